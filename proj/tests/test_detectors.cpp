#include <catch2/catch.hpp>

#include <cmath>

#include "imud/detectors.hpp"
#include "imud/rng.hpp"

using namespace imud;

namespace {

struct Instance {
    SystemParams params;
    SlotMatrix slot;
    ReceivedSamples received;
    std::vector<int> symbols; // transmitted +-1 per user (repetition case)
};

Instance random_uncoded_instance(int users, int nc, int nf, double sigma, Rng& rng, bool noiseless = false) {
    const auto params = SystemParams::uniform(users, nc, nf);
    const auto pattern = generate_hopping(params, rng);
    SlotMatrix slot(pattern, params);
    std::vector<std::int8_t> bits(static_cast<std::size_t>(users));
    std::vector<int> symbols(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
        bits[static_cast<std::size_t>(k)] = rng.coin() ? 1 : -1;
        symbols[static_cast<std::size_t>(k)] = bits[static_cast<std::size_t>(k)];
    }
    const auto clean = transmit(slot, params, Symbols::uncoded(bits, nf));
    ReceivedSamples received;
    if (noiseless) {
        received.samples = clean;
        received.noise_std = sigma;
    } else {
        received = add_awgn(clean, sigma, rng);
    }
    return Instance{params, std::move(slot), std::move(received), std::move(symbols)};
}

int symbol_of(const DetectionResult& res, int user) {
    return res.decisions[static_cast<std::size_t>(user)][0] == 0 ? 1 : -1;
}

} // namespace

TEST_CASE("detect_fg3 decodes a clean single user in one iteration") {
    Rng rng(21);
    const auto params = SystemParams::uniform(1, 4, 3);
    const SlotMatrix slot(generate_hopping(params, rng), params);
    const auto clean = transmit(slot, params, Symbols::uncoded({1}, 3));
    const ReceivedSamples r{clean, 0.5};
    const auto res = detect_fg3(DetectorGraph(slot, params), r, 1);
    REQUIRE(symbol_of(res, 0) == 1);
    REQUIRE(res.llrs[0][0] > 0.0);
}

TEST_CASE("detect_fg3 marginals are exact on trees") {
    Rng rng(314);
    int found = 0;
    while (found < 30) {
        const int users = 1 + static_cast<int>(rng.uniform_below(3));
        const int nc = 2 + static_cast<int>(rng.uniform_below(4));
        const int nf = 2 + static_cast<int>(rng.uniform_below(2));
        Instance inst = random_uncoded_instance(users, nc, nf, 0.9, rng);
        const DetectorGraph g(inst.slot, inst.params);
        if (!g.is_tree()) continue;
        ++found;
        const auto fg = detect_fg3(g, inst.received, 2 * (users + nf) + 2);
        const auto map = detect_map_oracle(inst.received, inst.slot, inst.params, repetition_code(nf),
                                           inst.received.noise_std);
        for (int k = 0; k < users; ++k) {
            REQUIRE(fg.llrs[static_cast<std::size_t>(k)][0] ==
                    Approx(map.llrs[static_cast<std::size_t>(k)][0]).margin(1e-6));
        }
    }
}

TEST_CASE("detect_fg3 keeps a nonzero error floor under heavy interference") {
    // K=3, Nc=20, Nf=3 at very high Eb/N0: residual collisions still cause errors
    Rng rng(5150);
    const double sigma = noise_std_from_ebn0(20.0, 1.0, 3, 1);
    long long errors = 0;
    const int trials = 30000;
    for (int t = 0; t < trials; ++t) {
        Instance inst = random_uncoded_instance(3, 20, 3, sigma, rng);
        const auto res = detect_fg3(DetectorGraph(inst.slot, inst.params), inst.received, 8);
        for (int k = 0; k < 3; ++k) errors += symbol_of(res, k) != inst.symbols[static_cast<std::size_t>(k)];
    }
    REQUIRE(errors > 0);
}

TEST_CASE("detect_cfg3 with a repetition code agrees with detect_fg3 on clean channels") {
    Rng rng(88);
    const auto code = repetition_code(3);
    const auto enc = systematic_generator(code);
    for (int t = 0; t < 300; ++t) {
        const int users = 1 + static_cast<int>(rng.uniform_below(4));
        Instance inst = random_uncoded_instance(users, 5, 3, 0.6, rng, /*noiseless=*/true);
        const auto fg = detect_fg3(DetectorGraph(inst.slot, inst.params), inst.received, 8);
        const auto cfg = detect_cfg3(DetectorGraph(inst.slot, inst.params, code), inst.received, enc, 8);
        for (int k = 0; k < users; ++k)
            REQUIRE(cfg.decisions[static_cast<std::size_t>(k)][0] == fg.decisions[static_cast<std::size_t>(k)][0]);
    }
}

TEST_CASE("detect_cfg3 reduces to plain belief propagation for one user") {
    // Hamming (7,4): no collisions possible with a single user
    BitMatrix h(3, 7);
    const int rows[3][7] = {{1, 0, 1, 0, 1, 0, 1}, {0, 1, 1, 0, 0, 1, 1}, {0, 0, 0, 1, 1, 1, 1}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 7; ++c) h.set(r, c, rows[r][c]);
    const LinearCode code = make_code(h, "hamming74");
    const Encoder enc = systematic_generator(code);

    Rng rng(3456);
    const auto params = SystemParams::uniform(1, 4, 7);
    const SlotMatrix slot(generate_hopping(params, rng), params);
    // all-zero codeword, nearly noiseless
    const auto clean = transmit(slot, params, Symbols::uncoded({1}, 7));
    const ReceivedSamples r{clean, 0.05};
    const auto res = detect_cfg3(DetectorGraph(slot, params, code), r, enc, 8);
    for (int t = 0; t < enc.k; ++t) REQUIRE(res.decisions[0][static_cast<std::size_t>(t)] == 0);
    for (int j = 0; j < 7; ++j) REQUIRE(res.llrs[0][static_cast<std::size_t>(j)] > 0.0);
}

TEST_CASE("detect_cfg3 marginals are exact on coded trees") {
    Rng rng(2718);
    const auto code = repetition_code(3);
    const auto enc = systematic_generator(code);
    int found = 0;
    while (found < 30) {
        const int users = 1 + static_cast<int>(rng.uniform_below(2));
        Instance inst = random_uncoded_instance(users, 2 + static_cast<int>(rng.uniform_below(4)), 3, 1.0, rng);
        const DetectorGraph g(inst.slot, inst.params, code);
        if (!g.is_tree()) continue;
        ++found;
        const auto cfg = detect_cfg3(g, inst.received, enc, 12);
        const auto map = detect_map_oracle(inst.received, inst.slot, inst.params, code, inst.received.noise_std);
        for (int k = 0; k < users; ++k)
            for (int j = 0; j < 3; ++j)
                REQUIRE(cfg.llrs[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] ==
                        Approx(map.llrs[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]).margin(1e-6));
    }
}

TEST_CASE("detect_cfg3 validates its inputs") {
    Rng rng(1);
    const auto params = SystemParams::uniform(2, 4, 3);
    const SlotMatrix slot(generate_hopping(params, rng), params);
    const ReceivedSamples r{std::vector<double>(12, 0.0), 1.0};
    const auto code = repetition_code(3);
    REQUIRE_THROWS_AS(detect_cfg3(DetectorGraph(slot, params), r, systematic_generator(code), 4),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DetectorGraph(slot, params, repetition_code(4)), std::invalid_argument);
}

TEST_CASE("detect_id single user is matched-filter combining in one pass") {
    Rng rng(64);
    for (int t = 0; t < 50; ++t) {
        Instance inst = random_uncoded_instance(1, 5, 4, 1.0, rng);
        const DetectorGraph g(inst.slot, inst.params);
        const auto res = detect_id(g, inst.received, 1);
        double mf = 0.0;
        for (int f = 0; f < 4; ++f) mf += inst.received.samples[static_cast<std::size_t>(inst.slot.pulse_row(0, f))];
        REQUIRE(symbol_of(res, 0) == sign_pm(mf));
        // and more iterations change nothing for a lone user
        REQUIRE(symbol_of(detect_id(g, inst.received, 8), 0) == sign_pm(mf));
    }
}

TEST_CASE("detect_id cancels a full collision within two iterations") {
    // both users share every slot; the received vector is exactly zero
    HoppingPattern p;
    p.users = 2;
    p.frames = 3;
    p.chips = {2, 0, 1, 2, 0, 1};
    const auto params = SystemParams::uniform(2, 4, 3);
    const SlotMatrix slot(p, params);
    const auto clean = transmit(slot, params, Symbols::uncoded({1, -1}, 3));
    for (double v : clean) REQUIRE(v == Approx(0.0));
    const ReceivedSamples r{clean, 0.4};
    const auto res = detect_id(DetectorGraph(slot, params), r, 2);
    REQUIRE(symbol_of(res, 0) == 1);
    REQUIRE(symbol_of(res, 1) == -1);
}

TEST_CASE("detect_id floors above detect_fg3 under heavy load") {
    // K=30, Nc=20 at high Eb/N0, paired instances
    Rng rng(8080);
    const double sigma = noise_std_from_ebn0(18.0, 1.0, 3, 1);
    long long id_errors = 0, fg_errors = 0;
    for (int t = 0; t < 2000; ++t) {
        Instance inst = random_uncoded_instance(30, 20, 3, sigma, rng);
        const DetectorGraph g(inst.slot, inst.params);
        const auto id = detect_id(g, inst.received, 8);
        const auto fg = detect_fg3(g, inst.received, 8);
        for (int k = 0; k < 30; ++k) {
            id_errors += symbol_of(id, k) != inst.symbols[static_cast<std::size_t>(k)];
            fg_errors += symbol_of(fg, k) != inst.symbols[static_cast<std::size_t>(k)];
        }
    }
    REQUIRE(fg_errors > 0);
    REQUIRE(id_errors > fg_errors);
}

TEST_CASE("detect_fp equals detect_fg3 for a single user") {
    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        Instance inst = random_uncoded_instance(1, 6, 3, 0.8, rng);
        const DetectorGraph g(inst.slot, inst.params);
        const auto fg = detect_fg3(g, inst.received, 4);
        const auto fp = detect_fp(g, inst.received, 4);
        REQUIRE(fp.decisions == fg.decisions);
    }
}

TEST_CASE("detect_fp and detect_fg3 agree on multiuser instances") {
    Rng rng(1001);
    for (int t = 0; t < 300; ++t) {
        const int users = 1 + static_cast<int>(rng.uniform_below(5));
        Instance inst = random_uncoded_instance(users, 10, 3, 0.7, rng);
        const DetectorGraph g(inst.slot, inst.params);
        const auto fg = detect_fg3(g, inst.received, 8);
        const auto fp = detect_fp(g, inst.received, 8);
        REQUIRE(fp.decisions == fg.decisions);
    }
}

TEST_CASE("detect_fp mirrors detect_fg3 message trajectories") {
    Rng rng(7007);
    for (int t = 0; t < 40; ++t) {
        const int users = 2 + static_cast<int>(rng.uniform_below(3));
        Instance inst = random_uncoded_instance(users, 8, 3, 0.8, rng);
        const DetectorGraph g(inst.slot, inst.params);
        for (int iters = 1; iters <= 5; ++iters) {
            const auto fg = detect_fg3(g, inst.received, iters);
            const auto fp = detect_fp(g, inst.received, iters);
            for (int k = 0; k < users; ++k)
                REQUIRE(fp.llrs[static_cast<std::size_t>(k)][0] ==
                        Approx(fg.llrs[static_cast<std::size_t>(k)][0]).margin(1e-9));
        }
    }
}

TEST_CASE("detect_blinking decides from collision-free pulses") {
    Rng rng(90);
    SECTION("no collisions, noiseless, b = -1") {
        const auto params = SystemParams::uniform(1, 5, 3);
        const SlotMatrix slot(generate_hopping(params, rng), params);
        const auto clean = transmit(slot, params, Symbols::uncoded({-1}, 3));
        const auto d = detect_blinking(ReceivedSamples{clean, 0.4}, slot, params, 0);
        REQUIRE(d.symbol == -1);
        REQUIRE_FALSE(d.all_collided);
    }
    SECTION("every frame collided falls back to +1 and flags the erasure") {
        HoppingPattern p;
        p.users = 2;
        p.frames = 2;
        p.chips = {3, 3, 3, 3};
        const auto params = SystemParams::uniform(2, 5, 2);
        const SlotMatrix slot(p, params);
        const auto clean = transmit(slot, params, Symbols::uncoded({-1, -1}, 2));
        const auto d = detect_blinking(ReceivedSamples{clean, 0.4}, slot, params, 0);
        REQUIRE(d.symbol == 1);
        REQUIRE(d.all_collided);
    }
    SECTION("user index is checked") {
        const auto params = SystemParams::uniform(1, 5, 3);
        const SlotMatrix slot(generate_hopping(params, rng), params);
        REQUIRE_THROWS_AS(detect_blinking(ReceivedSamples{std::vector<double>(15, 0.0), 1.0}, slot, params, 1),
                          std::out_of_range);
    }
}

TEST_CASE("detect_id and detect_blinking coincide for a single user") {
    Rng rng(246);
    for (int t = 0; t < 100; ++t) {
        Instance inst = random_uncoded_instance(1, 4, 3, 1.2, rng);
        const auto id = detect_id(DetectorGraph(inst.slot, inst.params), inst.received, 3);
        const auto br = detect_blinking(inst.received, inst.slot, inst.params, 0);
        REQUIRE(symbol_of(id, 0) == br.symbol);
    }
}
