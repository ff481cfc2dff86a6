/*
 *  ipnr -- a miniature island-style FPGA place-and-route flow
 *
 *  Permission to use, copy, modify, and/or distribute this software for any
 *  purpose with or without fee is hereby granted, provided that the above
 *  copyright notice and this permission notice appear in all copies.
 *
 *  THE SOFTWARE IS PROVIDED "AS IS" AND THE AUTHOR DISCLAIMS ALL WARRANTIES
 *  WITH REGARD TO THIS SOFTWARE.
 */

#include <benchmark/benchmark.h>

#include "ipnr/archdb.hh"
#include "ipnr/bitgen.hh"
#include "ipnr/longpath.hh"
#include "ipnr/pack.hh"
#include "ipnr/place.hh"
#include "ipnr/route.hh"
#include "ipnr/techmap.hh"
#include "ipnr/timing.hh"
#include "netlist_gen.hh"

namespace {

ipnr::ArchParams bench_params(int dim)
{
    ipnr::ArchParams p;
    p.width = dim;
    p.height = dim;
    p.channel_width = 4;
    p.lut_inputs = 4;
    p.bels_per_tile = 2;
    return p;
}

ipnr::Netlist packed_chain(int length)
{
    using namespace ipnr;
    Netlist n = pack_netlist(techmap_netlist(ipnr_test::chain_netlist(length, 4), 4, false), 4);
    // pad cells anchor the chain ends at the IO ring, keeping it routable
    for (const auto &[pname, port] : n.ports) {
        Cell pad;
        pad.type = "PAD";
        pad.params["DIR"] = port.dir == PortDir::INPUT ? "in" : "out";
        pad.conns[port.dir == PortDir::INPUT ? "PADOUT" : "PADIN"] = port.net;
        n.cells.emplace(pname, pad);
    }
    n.ports.clear();
    return n;
}

// A placement of `n` that is known to route, found by scanning seeds once.
ipnr::Placement routable_placement(const ipnr::DeviceDB &db, const ipnr::Netlist &n)
{
    using namespace ipnr;
    for (uint64_t seed = 1; seed <= 8; seed++) {
        AnalyticConfig cfg;
        cfg.seed = seed;
        Placement p = heap_place(n, db, PlaceConstraints{}, cfg);
        try {
            route_all(db, n, p);
            return p;
        } catch (const Error &) {
        }
    }
    throw std::runtime_error("no routable placement for the benchmark design");
}

void BM_GenerateDevice(benchmark::State &state)
{
    auto p = bench_params(int(state.range(0)));
    for (auto _ : state) {
        auto db = ipnr::DeviceDB::generate(p);
        benchmark::DoNotOptimize(db.wire_count());
    }
}
BENCHMARK(BM_GenerateDevice)->Arg(16)->Arg(32);

void BM_DeviceSaveLoad(benchmark::State &state)
{
    auto db = ipnr::DeviceDB::generate(bench_params(int(state.range(0))));
    for (auto _ : state) {
        auto bytes = db.save_bytes();
        auto db2 = ipnr::DeviceDB::load_bytes(bytes);
        benchmark::DoNotOptimize(db2.wire_count());
    }
}
BENCHMARK(BM_DeviceSaveLoad)->Arg(16)->Arg(32);

void BM_TechmapWideLut(benchmark::State &state)
{
    using namespace ipnr;
    int w = int(state.range(0));
    std::mt19937_64 rng(1);
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
    n.cells.emplace("l", ipnr_test::make_lut(w, ipnr_test::random_mask(w, rng), inputs, y));
    for (auto _ : state) {
        Netlist mapped = techmap_netlist(n, 4, false);
        benchmark::DoNotOptimize(mapped.cells.size());
    }
}
BENCHMARK(BM_TechmapWideLut)->Arg(8)->Arg(10);

void BM_AnnealPlace(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(12));
    Netlist n = packed_chain(int(state.range(0)));
    SAConfig cfg;
    cfg.lambda = 0;
    for (auto _ : state) {
        Placement p = sa_place(n, db, PlaceConstraints{}, cfg);
        benchmark::DoNotOptimize(p.hpwl_cost);
    }
}
BENCHMARK(BM_AnnealPlace)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AnalyticPlace(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(12));
    Netlist n = packed_chain(int(state.range(0)));
    for (auto _ : state) {
        Placement p = heap_place(n, db, PlaceConstraints{}, AnalyticConfig{});
        benchmark::DoNotOptimize(p.hpwl_cost);
    }
}
BENCHMARK(BM_AnalyticPlace)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_RouteChain(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(12));
    Netlist n = packed_chain(int(state.range(0)));
    Placement p = routable_placement(db, n);
    for (auto _ : state) {
        RouteResult rr = route_all(db, n, p);
        benchmark::DoNotOptimize(rr.iterations);
    }
}
BENCHMARK(BM_RouteChain)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Sta(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(12));
    Netlist n = packed_chain(32);
    Placement p = routable_placement(db, n);
    Routing r = route_all(db, n, p).routing;
    for (auto _ : state) {
        TimingReport rep = sta(db, n, p, &r, DelayModel{});
        benchmark::DoNotOptimize(rep.worst_path_ps);
    }
}
BENCHMARK(BM_Sta);

void BM_LongestPath(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(8));
    RoutingGraph g = build_routing_graph(db, "PAD0", "PAD13");
    LongPathConfig cfg;
    cfg.max_iters = state.range(0);
    for (auto _ : state) {
        LongestPathResult res = longest_simple_path(g, cfg);
        benchmark::DoNotOptimize(res.path.size());
    }
}
BENCHMARK(BM_LongestPath)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EmitBitstream(benchmark::State &state)
{
    using namespace ipnr;
    DeviceDB db = DeviceDB::generate(bench_params(12));
    Netlist n = packed_chain(32);
    Placement p = routable_placement(db, n);
    Routing r = route_all(db, n, p).routing;
    for (auto _ : state) {
        std::string text = emit_bitstream(db, n, p, r);
        benchmark::DoNotOptimize(text.size());
    }
}
BENCHMARK(BM_EmitBitstream);

} // namespace

BENCHMARK_MAIN();
