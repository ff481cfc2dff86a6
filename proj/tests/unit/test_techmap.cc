#include <doctest.h>

#include <random>

#include "ipnr/pack.hh"
#include "ipnr/techmap.hh"
#include "netlist_gen.hh"

using namespace ipnr;

namespace {

// One $lut with W top-level inputs, suitable for exhaustive simulation.
Netlist single_lut_netlist(int w, const std::string &mask)
{
    Netlist n;
    n.top = "top";
    std::vector<int32_t> inputs;
    for (int k = 0; k < w; k++) {
        int32_t net = n.add_net();
        n.ports.emplace("in" + std::to_string(k), TopPort{PortDir::INPUT, net});
        inputs.push_back(net);
    }
    int32_t y = n.add_net();
    n.ports.emplace("out", TopPort{PortDir::OUTPUT, y});
    n.cells.emplace("l", ipnr_test::make_lut(w, mask, inputs, y));
    return n;
}

// Simulate all 2^w input vectors in one run; in{k} carries bit k of the
// vector index.
std::vector<uint8_t> truth_table(const Netlist &n, int w)
{
    int cycles = 1 << w;
    Stimulus st;
    for (int k = 0; k < w; k++) {
        std::vector<uint8_t> v(static_cast<size_t>(cycles));
        for (int i = 0; i < cycles; i++)
            v[size_t(i)] = uint8_t((i >> k) & 1);
        st["in" + std::to_string(k)] = v;
    }
    Trace tr = simulate(n, st, cycles);
    std::vector<uint8_t> out(static_cast<size_t>(cycles));
    for (int i = 0; i < cycles; i++)
        out[size_t(i)] = tr[size_t(i)].at("out");
    return out;
}

} // namespace

TEST_SUITE("techmap")
{
    TEST_CASE("eval_lut basics")
    {
        LutMask xor2 = LutMask::from_string(2, "0110");
        CHECK(eval_lut(xor2, {1, 0}) == 1); // A0=1, A1=0
        CHECK(eval_lut(xor2, {0, 0}) == 0);
        CHECK(eval_lut(xor2, {1, 1}) == 0);
        CHECK(eval_lut(LutMask::zeros(3), {1, 1, 0}) == 0);

        LutMask mux = mux_lut3_mask();
        CHECK(mux.to_hex() == "0xCA");
        // Y = S ? I1 : I0, inputs (I0, I1, S).
        CHECK(eval_lut(mux, {0, 1, 1}) == 1);
        CHECK(eval_lut(mux, {1, 0, 0}) == 1);
        CHECK(eval_lut(mux, {0, 0, 1}) == 0);
        // Exhaustive against the select semantics.
        for (int i = 0; i < 8; i++) {
            uint8_t i0 = i & 1, i1 = uint8_t((i >> 1) & 1), s = uint8_t((i >> 2) & 1);
            CHECK(eval_lut(mux, {i0, i1, s}) == (s ? i1 : i0));
        }
        CHECK_THROWS_AS(eval_lut(xor2, {1}), WidthMismatch);
    }

    TEST_CASE("split obeys the Shannon identity")
    {
        LutMask m = LutMask::from_string(2, "0110");
        auto [lo, hi] = split_lut_mask(m);
        CHECK(lo.to_string() == "10");
        CHECK(hi.to_string() == "01");

        std::mt19937_64 rng(3);
        for (int w = 2; w <= 8; w++)
            for (int rep = 0; rep < 20; rep++) {
                LutMask mask = LutMask::from_string(w, ipnr_test::random_mask(w, rng));
                auto [l, h] = split_lut_mask(mask);
                // Recombination is the identity.
                CHECK(h.to_string() + l.to_string() == mask.to_string());
                for (int i = 0; i < (1 << w); i++) {
                    std::vector<uint8_t> in(static_cast<size_t>(w));
                    for (int k = 0; k < w; k++)
                        in[size_t(k)] = uint8_t((i >> k) & 1);
                    std::vector<uint8_t> sub(in.begin(), in.end() - 1);
                    uint8_t expect = in.back() ? eval_lut(h, sub) : eval_lut(l, sub);
                    CHECK(eval_lut(mask, in) == expect);
                }
            }
        CHECK_THROWS_AS(split_lut_mask(LutMask::zeros(1)), WidthTooSmall);
    }

    TEST_CASE("mask replication")
    {
        LutMask m = LutMask::from_string(2, "0110");
        CHECK(replicate_mask(m, 4).to_string() == "0110011001100110");
        CHECK(replicate_mask(m, 2).to_string() == "0110");
    }

    TEST_CASE("decomposition cell counts")
    {
        auto count_cells = [](int w, int k, bool hard_mux, uint64_t seed) {
            std::mt19937_64 rng(seed);
            Netlist n = single_lut_netlist(w, ipnr_test::random_mask(w, rng));
            Netlist mapped = techmap_netlist(n, k, hard_mux);
            int luts = 0, muxes = 0;
            for (const auto &[name, c] : mapped.cells) {
                if (c.type == "LUT_K" && name != "$gnd")
                    luts++;
                if (c.type == "MUX2")
                    muxes++;
            }
            return std::make_pair(luts, muxes);
        };
        // W=8, K=6: 4 leaves + 3 muxes.
        auto [l86, m86] = count_cells(8, 6, true, 1);
        CHECK(l86 == 4);
        CHECK(m86 == 3);
        // W <= K collapses to a single widened LUT.
        auto [l24, m24] = count_cells(2, 4, true, 2);
        CHECK(l24 == 1);
        CHECK(m24 == 0);
        // W=8, K=4, muxes lowered to LUT3s: 16 + 15 = 31 LUT cells.
        auto [l84, m84] = count_cells(8, 4, false, 3);
        CHECK(l84 == 31);
        CHECK(m84 == 0);
    }

    TEST_CASE("widened LUT mask replication example")
    {
        Netlist n = single_lut_netlist(2, "0110");
        Netlist mapped = techmap_netlist(n, 4, true);
        bool found = false;
        for (const auto &[name, c] : mapped.cells)
            if (c.type == "LUT_K" && name != "$gnd" && c.params.at("LUT") == "0110011001100110")
                found = true;
        CHECK(found);
    }

    TEST_CASE("netlist with no $lut cells is unchanged modulo normalization")
    {
        Netlist n;
        n.top = "top";
        int32_t clk = n.add_net(), d = n.add_net(), q = n.add_net();
        n.ports.emplace("clk", TopPort{PortDir::INPUT, clk});
        n.ports.emplace("d", TopPort{PortDir::INPUT, d});
        n.ports.emplace("q", TopPort{PortDir::OUTPUT, q});
        n.cells.emplace("ff", ipnr_test::make_dff(clk, d, q));
        Netlist mapped = techmap_netlist(n, 4, false);
        CHECK(mapped.cells == n.cells);
        CHECK(mapped.ports == n.ports);
    }

    TEST_CASE("decomposition preserves the truth table exhaustively")
    {
        std::mt19937_64 rng(11);
        for (int w = 2; w <= 10; w++)
            for (int k : {2, 3, 4, 6, 8}) {
                if (w > k && k < 3)
                    continue; // no room to absorb muxes without hard muxes
                std::string mask = ipnr_test::random_mask(w, rng);
                Netlist n = single_lut_netlist(w, mask);
                Netlist mapped = techmap_netlist(n, k, false);
                CHECK(truth_table(mapped, w) == truth_table(n, w));
            }
        // Hard-mux variant on the Fig.-2-shaped case.
        std::string mask = ipnr_test::random_mask(8, rng);
        Netlist n = single_lut_netlist(8, mask);
        CHECK(truth_table(techmap_netlist(n, 6, true), 8) == truth_table(n, 8));
    }

    TEST_CASE("mux lowering impossible on K=2 targets")
    {
        Netlist n = single_lut_netlist(4, "0110100101101001");
        CHECK_THROWS_AS(techmap_netlist(n, 2, false), WidthTooSmall);
    }
}
