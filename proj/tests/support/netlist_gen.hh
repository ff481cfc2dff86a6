#ifndef IPNR_TESTS_NETLIST_GEN_HH
#define IPNR_TESTS_NETLIST_GEN_HH

#include <random>
#include <string>
#include <vector>

#include "ipnr/netlist.hh"
#include "ipnr/pack.hh"
#include "ipnr/techmap.hh"

// Shared helpers for building generic $lut/$dff test netlists.
namespace ipnr_test {

inline ipnr::Cell make_lut(int width, const std::string &mask, const std::vector<int32_t> &inputs, int32_t y)
{
    ipnr::Cell c;
    c.type = "$lut";
    c.params["WIDTH"] = width;
    c.params["LUT"] = mask;
    for (size_t k = 0; k < inputs.size(); k++)
        c.conns["A" + std::to_string(k)] = inputs[k];
    c.conns["Y"] = y;
    return c;
}

inline ipnr::Cell make_dff(int32_t clk, int32_t d, int32_t q)
{
    ipnr::Cell c;
    c.type = "$dff";
    c.conns["C"] = clk;
    c.conns["D"] = d;
    c.conns["Q"] = q;
    return c;
}

inline std::string random_mask(int width, std::mt19937_64 &rng)
{
    std::string s(size_t(1) << width, '0');
    for (auto &ch : s)
        ch = (rng() & 1) ? '1' : '0';
    return s;
}

// Random DAG of $lut cells with sprinkled $dffs, a clock port when any FF
// exists, and every internal net observable or feeding something.
struct RandomNetlistSpec
{
    int num_inputs = 4;
    int num_luts = 10;
    int max_width = 4;
    double ff_prob = 0.3;
    int num_outputs = 3;
};

inline ipnr::Netlist random_netlist(const RandomNetlistSpec &spec, uint64_t seed)
{
    using namespace ipnr;
    std::mt19937_64 rng(seed);
    Netlist n;
    n.top = "top";
    std::vector<int32_t> avail; // nets usable as LUT inputs
    int32_t clk = -1;
    bool any_ff = false;

    for (int i = 0; i < spec.num_inputs; i++) {
        int32_t net = n.add_net();
        n.ports.emplace("in" + std::to_string(i), TopPort{PortDir::INPUT, net});
        avail.push_back(net);
    }
    for (int i = 0; i < spec.num_luts; i++) {
        int w = 2 + int(rng() % uint64_t(spec.max_width - 1));
        std::vector<int32_t> inputs;
        for (int k = 0; k < w; k++)
            inputs.push_back(avail[size_t(rng() % avail.size())]);
        int32_t y = n.add_net();
        n.cells.emplace("lut" + std::to_string(i), make_lut(w, random_mask(w, rng), inputs, y));
        int32_t data = y;
        if (std::uniform_real_distribution<double>(0, 1)(rng) < spec.ff_prob) {
            if (clk < 0)
                clk = n.add_net();
            any_ff = true;
            int32_t q = n.add_net();
            n.cells.emplace("ff" + std::to_string(i), make_dff(clk, y, q));
            data = q;
        }
        avail.push_back(data);
    }
    if (any_ff)
        n.ports.emplace("clk", TopPort{PortDir::INPUT, clk});
    for (int i = 0; i < spec.num_outputs; i++)
        n.ports.emplace("out" + std::to_string(i),
                        TopPort{PortDir::OUTPUT, avail[avail.size() - 1 - (size_t(i) % avail.size())]});
    return n;
}

// A chain of width-K LUTs (each reusing its predecessor), ending in a
// top-level output; the classic placement benchmark shape.
inline ipnr::Netlist chain_netlist(int length, int K)
{
    using namespace ipnr;
    Netlist n;
    n.top = "chain";
    int32_t in = n.add_net();
    n.ports.emplace("in", TopPort{PortDir::INPUT, in});
    int32_t prev = in;
    std::mt19937_64 rng(7);
    for (int i = 0; i < length; i++) {
        std::vector<int32_t> inputs(size_t(K), prev);
        int32_t y = n.add_net();
        n.cells.emplace("c" + std::to_string(i), make_lut(K, random_mask(K, rng), inputs, y));
        prev = y;
    }
    n.ports.emplace("out", TopPort{PortDir::OUTPUT, prev});
    return n;
}

inline ipnr::Stimulus random_stimulus(const ipnr::Netlist &n, int cycles, uint64_t seed)
{
    std::mt19937_64 rng(seed);
    ipnr::Stimulus st;
    for (const auto &[name, p] : n.ports)
        if (p.dir == ipnr::PortDir::INPUT && name != "clk") {
            std::vector<uint8_t> v(static_cast<size_t>(cycles));
            for (auto &b : v)
                b = uint8_t(rng() & 1);
            st[name] = v;
        }
    return st;
}

} // namespace ipnr_test

#endif
