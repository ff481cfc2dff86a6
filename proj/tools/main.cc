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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <queue>
#include <sstream>

#include <CLI11.hpp>

#include "ipnr/bitgen.hh"
#include "ipnr/longpath.hh"
#include "ipnr/pack.hh"
#include "ipnr/place.hh"
#include "ipnr/route.hh"
#include "ipnr/techmap.hh"

using namespace ipnr;
namespace fs = std::filesystem;

namespace {

// Exit codes shared by all subcommands.
constexpr int EXIT_BAD_INPUT = 2;
constexpr int EXIT_UNROUTABLE = 3;
constexpr int EXIT_UNPLACEABLE = 4;
constexpr int EXIT_UNREACHABLE = 5;

struct CommandError
{
    int code;
    std::string message;
};

[[noreturn]] void die(int code, const std::string &message)
{
    throw CommandError{code, message};
}

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        die(EXIT_BAD_INPUT, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        die(EXIT_BAD_INPUT, "cannot write '" + path + "'");
    out << text;
}

std::string hash_hex(const DeviceDB &db)
{
    return str_format("%016llx", (unsigned long long)db.device_hash());
}

DeviceDB load_db(const std::string &path)
{
    if (!fs::exists(path))
        die(EXIT_BAD_INPUT, "device file '" + path + "' does not exist");
    return DeviceDB::load(path);
}

// Replace the top-level ports with PAD cells of the same name so the rest
// of the flow deals with placeable cells only. The PCF's set_io entries
// then pin these cells by their port name.
void insert_pads(Netlist &n)
{
    for (const auto &[name, port] : n.ports) {
        if (n.cells.count(name))
            die(EXIT_BAD_INPUT, "port '" + name + "' collides with a cell of the same name");
        Cell pad;
        pad.type = "PAD";
        pad.params["DIR"] = port.dir == PortDir::INPUT ? "in" : "out";
        pad.conns[port.dir == PortDir::INPUT ? "PADOUT" : "PADIN"] = port.net;
        n.cells.emplace(name, pad);
    }
    n.ports.clear();
}

// ---------------------------------------------------------------- gen-arch

int cmd_gen_arch(const ArchParams &ap, const std::string &out_path)
{
    DeviceDB db;
    try {
        db = DeviceDB::generate(ap);
    } catch (const InvalidParams &e) {
        die(EXIT_BAD_INPUT, std::string("invalid device parameters: ") + e.what());
    }
    db.save(out_path);
    std::cout << str_format("%dx%d device: %lld wires, %lld pips, %lld bels, %d tile types, hash %s\n",
                            ap.width, ap.height, (long long)db.wire_count(), (long long)db.pip_count(),
                            (long long)db.bel_count(), int(db.tile_types.size()), hash_hex(db).c_str());
    return 0;
}

// --------------------------------------------------------------------- pnr

struct PnrOptions
{
    std::string design_path, db_path, pcf_path, out_dir;
    std::string placer = "sa";
    uint64_t seed = 1;
    double lambda = 0.5;
    int32_t route_iters = 200;
    int32_t retries = 8;
    std::optional<int64_t> period_ps;
};

int cmd_pnr(const PnrOptions &opt)
{
    DeviceDB db = load_db(opt.db_path);
    Netlist design;
    try {
        design = parse_netlist(slurp(opt.design_path));
    } catch (const Error &e) {
        die(EXIT_BAD_INPUT, std::string("cannot parse design: ") + e.what());
    }
    for (const auto &d : validate(design))
        if (d.level == "ERROR")
            die(EXIT_BAD_INPUT, "design does not validate: " + d.str());

    PlaceConstraints cons;
    if (!opt.pcf_path.empty()) {
        try {
            cons = parse_pcf(slurp(opt.pcf_path));
        } catch (const ConstraintSyntaxError &e) {
            die(EXIT_BAD_INPUT, std::string("bad constraint file: ") + e.what());
        }
    }

    const int K = db.params.lut_inputs;
    Netlist mapped = techmap_netlist(design, K, false);
    Netlist packed = pack_netlist(mapped, K);
    insert_pads(packed);

    // The desk-scale fabric offers exactly one channel wire per
    // (channel-class, parity) pair in each tile, so dense placements are
    // often unroutable no matter how long the router negotiates. The flow
    // therefore retries with derived placement seeds before giving up;
    // the attempt sequence is a pure function of --seed.
    DelayModel model;
    Placement placement;
    RouteResult routed;
    bool done = false;
    std::string route_error;
    uint64_t place_seed = opt.seed;
    for (int32_t attempt = 0; attempt < std::max(opt.retries, 1) && !done; attempt++) {
        place_seed = opt.seed + uint64_t(attempt);
        try {
            if (opt.placer == "sa") {
                SAConfig cfg;
                cfg.seed = place_seed;
                cfg.lambda = opt.lambda;
                placement = sa_place(packed, db, cons, cfg, model);
            } else {
                AnalyticConfig cfg;
                cfg.seed = place_seed;
                placement = heap_place(packed, db, cons, cfg, model);
            }
        } catch (const InsufficientCapacity &e) {
            die(EXIT_UNPLACEABLE, std::string("placement failed: ") + e.what());
        } catch (const UnsatisfiableConstraint &e) {
            die(EXIT_UNPLACEABLE, std::string("placement failed: ") + e.what());
        } catch (const UnanchoredComponent &e) {
            die(EXIT_UNPLACEABLE, std::string("placement failed: ") + e.what());
        }
        auto pdiags = audit_placement(db, packed, placement, cons);
        if (!pdiags.empty())
            die(EXIT_UNPLACEABLE, "placement audit failed: " + pdiags.front());

        RouteConfig rcfg;
        rcfg.max_iterations = opt.route_iters;
        rcfg.model = model;
        try {
            routed = route_all(db, packed, placement, rcfg);
            done = true;
        } catch (const RoutingFailed &e) {
            route_error = str_format("routing failed after %d iterations: %lld overused wires remain",
                                     e.iterations, (long long)e.overused_wires);
            std::cerr << str_format("note: placement seed %llu unroutable (%s), retrying\n",
                                    (unsigned long long)place_seed, route_error.c_str());
        } catch (const Unroutable &e) {
            route_error = e.what();
            std::cerr << str_format("note: placement seed %llu unroutable (%s), retrying\n",
                                    (unsigned long long)place_seed, route_error.c_str());
        }
    }
    if (!done)
        die(EXIT_UNROUTABLE, route_error);

    TimingReport timing = sta(db, packed, placement, &routed.routing, model, opt.period_ps);
    std::string fasm = emit_bitstream(db, packed, placement, routed.routing);

    fs::create_directories(opt.out_dir);
    Netlist out = packed;
    attach_placement(out, db, placement);
    attach_routing(out, db, routed.routing);
    out.attributes["IPNR_DEVICE"] = hash_hex(db);
    spit(opt.out_dir + "/routed.json", write_netlist(out));
    spit(opt.out_dir + "/design.fasm", fasm);
    spit(opt.out_dir + "/timing.json", timing.to_json().dump(2) + "\n");

    nlohmann::json stats = {
        {"seed", opt.seed},
        {"place_seed", place_seed},
        {"placer", opt.placer},
        {"cells", packed.cells.size()},
        {"nets", packed.num_nets},
        {"hpwl", hpwl(db, packed, placement)},
        {"route_iterations", routed.iterations},
        {"worst_path_ps", timing.worst_path_ps},
        {"fmax_mhz", timing.fmax_mhz},
    };
    spit(opt.out_dir + "/stats.json", stats.dump(2) + "\n");

    std::cout << str_format("pnr ok: %zu cells, route converged in %d iterations, worst path %lld ps\n",
                            packed.cells.size(), routed.iterations, (long long)timing.worst_path_ps);
    return 0;
}

// ------------------------------------------------------------ longest-path

// Delay-shortest source-to-sink path over the same graph, the comparison
// row of the report.
std::vector<int32_t> dijkstra_path(const RoutingGraph &g)
{
    std::vector<int64_t> dist(g.nodes.size(), std::numeric_limits<int64_t>::max());
    std::vector<int32_t> prev(g.nodes.size(), -1);
    using Item = std::pair<int64_t, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[size_t(g.source)] = 0;
    heap.push({0, g.source});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[size_t(u)])
            continue;
        for (const auto &e : g.adj[size_t(u)])
            if (d + e.delay_ps < dist[size_t(e.to)]) {
                dist[size_t(e.to)] = d + e.delay_ps;
                prev[size_t(e.to)] = u;
                heap.push({dist[size_t(e.to)], e.to});
            }
    }
    std::vector<int32_t> path;
    if (dist[size_t(g.sink)] == std::numeric_limits<int64_t>::max())
        return path;
    for (int32_t u = g.sink; u >= 0; u = prev[size_t(u)])
        path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
}

int64_t graph_path_delay(const RoutingGraph &g, const std::vector<int32_t> &path)
{
    int64_t total = 0;
    for (size_t i = 0; i + 1 < path.size(); i++) {
        int64_t best = 0;
        for (const auto &e : g.adj[size_t(path[i])])
            if (e.to == path[i + 1])
                best = std::max<int64_t>(best, e.delay_ps);
        total += best;
    }
    return total;
}

struct LongestOptions
{
    std::string db_path, in_pad, out_pad, out_dir;
    double budget_s = 1.0;
    std::optional<int64_t> iters;
    uint64_t seed = 1;
};

int cmd_longest_path(const LongestOptions &opt)
{
    DeviceDB db = load_db(opt.db_path);
    RoutingGraph g;
    try {
        g = build_routing_graph(db, opt.in_pad, opt.out_pad);
    } catch (const BadPad &e) {
        die(EXIT_BAD_INPUT, e.what());
    }

    LongPathConfig cfg;
    cfg.budget_s = opt.budget_s;
    cfg.max_iters = opt.iters;
    cfg.seed = opt.seed;
    LongestPathResult longest;
    std::vector<int32_t> reachable;
    try {
        longest = longest_simple_path(g, cfg);
        reachable = scc_reachable(g, g.source, g.sink);
    } catch (const Unreachable &e) {
        die(EXIT_UNREACHABLE, e.what());
    } catch (const DisconnectedEndpoints &e) {
        die(EXIT_UNREACHABLE, e.what());
    }

    std::vector<int32_t> shortest = dijkstra_path(g);
    int64_t shortest_delay = graph_path_delay(g, shortest);
    double shortest_fwires = fwires(shortest, reachable);

    auto row = [](const char *mode, size_t len, int64_t delay, double fw) {
        return str_format("%-9s %9zu %12lld %9.4f\n", mode, len ? len - 1 : 0, (long long)delay, fw);
    };
    std::cout << str_format("%-9s %9s %12s %9s\n", "mode", "path_len", "t_delay_ps", "f_wires");
    std::cout << row("longest", longest.path.size(), longest.t_delay_ps, longest.f_wires);
    std::cout << row("shortest", shortest.size(), shortest_delay, shortest_fwires);

    LoweredDesign low = path_to_routing(db, g, longest.path, opt.in_pad, opt.out_pad);

    fs::create_directories(opt.out_dir);
    nlohmann::json report = {
        {"device", hash_hex(db)},
        {"in", opt.in_pad},
        {"out", opt.out_pad},
        {"seed", opt.seed},
        {"iterations", longest.iterations},
        {"budget_used_s", longest.budget_used_s},
        {"longest",
         {{"path_len", longest.path.size() - 1},
          {"t_delay_ps", longest.t_delay_ps},
          {"f_wires", longest.f_wires}}},
        {"shortest",
         {{"path_len", shortest.size() - 1},
          {"t_delay_ps", shortest_delay},
          {"f_wires", shortest_fwires}}},
    };
    spit(opt.out_dir + "/report.json", report.dump(2) + "\n");
    spit(opt.out_dir + "/longest.fasm", emit_bitstream(db, low.netlist, low.placement, low.routing));

    Netlist out = low.netlist;
    attach_placement(out, db, low.placement);
    attach_routing(out, db, low.routing);
    out.attributes["IPNR_DEVICE"] = hash_hex(db);
    spit(opt.out_dir + "/longest.json", write_netlist(out));
    return 0;
}

// --------------------------------------------------------------------- svg

struct Point
{
    double x, y;
};

constexpr double TILE_PX = 48.0;

// Deterministic per-wire anchor point: spread the tile's local wires over
// two independent diagonals so polylines stay distinguishable.
Point wire_point(const DeviceDB &db, WireId w)
{
    size_t m = db.tile(w.x, w.y).wires.size();
    double fx = (double(w.index) + 1.0) / (double(m) + 1.0);
    double fy = (double((size_t(w.index) * 7) % m) + 1.0) / (double(m) + 1.0);
    return {(double(w.x) + 0.1 + 0.8 * fx) * TILE_PX, (double(w.y) + 0.1 + 0.8 * fy) * TILE_PX};
}

const char *tile_fill(TileKind k)
{
    switch (k) {
    case TileKind::LOGIC:
        return "#f4f1e8";
    case TileKind::CORNER:
        return "#c8c8c8";
    default:
        return "#dde4ee";
    }
}

int cmd_svg(const std::string &design_path, const std::string &db_path, const std::string &out_path)
{
    DeviceDB db = load_db(db_path);
    Netlist design;
    try {
        design = parse_netlist(slurp(design_path));
    } catch (const Error &e) {
        die(EXIT_BAD_INPUT, std::string("cannot parse design: ") + e.what());
    }
    if (auto it = design.attributes.find("IPNR_DEVICE"); it != design.attributes.end())
        if (it->second.get<std::string>() != hash_hex(db))
            die(EXIT_BAD_INPUT, "design was implemented on a different device (hash " +
                                    it->second.get<std::string>() + ", expected " + hash_hex(db) + ")");

    Placement placement = extract_placement(design, db);
    Routing routing = extract_routing(design, db);

    static const char *palette[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#d68910", "#148f77",
                                    "#884ea0", "#2e4053", "#a93226", "#1f618d", "#7d6608", "#633974"};
    std::string svg;
    svg += str_format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                      "viewBox=\"0 0 %d %d\">\n",
                      int(db.width() * TILE_PX), int(db.height() * TILE_PX), int(db.width() * TILE_PX),
                      int(db.height() * TILE_PX));
    for (int y = 0; y < db.height(); y++)
        for (int x = 0; x < db.width(); x++)
            svg += str_format("  <rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\" "
                              "stroke=\"#888\" stroke-width=\"1\"/>\n",
                              x * TILE_PX, y * TILE_PX, TILE_PX, TILE_PX, tile_fill(db.tile(x, y).kind));

    // bound bels as filled squares
    for (const auto &[cell, bel] : placement.cells) {
        double bx = (double(bel.x) + 0.15 + 0.35 * double(bel.index % 2)) * TILE_PX;
        double by = (double(bel.y) + 0.15 + 0.35 * double(bel.index / 2 % 2)) * TILE_PX;
        const char *fill = db.bel_kind(bel) == BelKind::PAD ? "#58707e" : "#b03a2e";
        svg += str_format("  <rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\">"
                          "<title>%s</title></rect>\n",
                          bx, by, 0.25 * TILE_PX, 0.25 * TILE_PX, fill, cell.c_str());
    }

    // one polyline per routed sink walk, colored per net
    for (const auto &[net, tree] : routing.nets) {
        const char *color = palette[size_t(net) % (sizeof(palette) / sizeof(palette[0]))];
        for (const auto &[sink, walk] : tree.sinks) {
            if (walk.empty())
                continue;
            std::string pts;
            Point p0 = wire_point(db, db.pip_src(walk.front()));
            pts += str_format("%.1f,%.1f", p0.x, p0.y);
            for (PipId pip : walk) {
                Point p = wire_point(db, db.pip_dst(pip));
                pts += str_format(" %.1f,%.1f", p.x, p.y);
            }
            svg += str_format("  <polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                              "stroke-width=\"1.5\" opacity=\"0.85\"/>\n",
                              pts.c_str(), color);
        }
    }
    svg += "</svg>\n";
    spit(out_path, svg);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"ipnr: miniature island-style FPGA implementation flow"};
    app.require_subcommand(1);

    // gen-arch
    ArchParams ap;
    std::string arch_out;
    auto *gen = app.add_subcommand("gen-arch", "generate a device database");
    gen->add_option("-W,--width", ap.width, "tile columns");
    gen->add_option("-H,--height", ap.height, "tile rows");
    gen->add_option("-C,--channels", ap.channel_width, "wires per channel direction");
    gen->add_option("-K,--lut-inputs", ap.lut_inputs, "LUT input count");
    gen->add_option("-N,--bels", ap.bels_per_tile, "logic bels per tile");
    gen->add_option("-P,--pads", ap.pads_per_io, "pads per IO tile");
    gen->add_option("--seed", ap.seed, "device seed");
    gen->add_option("-o,--output", arch_out, "output device file")->required();

    // pnr
    PnrOptions pnr;
    int64_t period_flag = 0;
    auto *run = app.add_subcommand("pnr", "run the full implementation flow");
    run->add_option("design", pnr.design_path, "input netlist JSON")->required();
    run->add_option("--db", pnr.db_path, "device database")->required();
    run->add_option("--pcf", pnr.pcf_path, "pin/region constraint file");
    run->add_option("--placer", pnr.placer, "placer choice")->check(CLI::IsMember({"sa", "heap"}));
    run->add_option("--seed", pnr.seed, "flow seed");
    run->add_option("--lambda", pnr.lambda, "timing weight in [0,1]")->check(CLI::Range(0.0, 1.0));
    run->add_option("--route-iters", pnr.route_iters, "router iteration cap");
    auto *period_opt = run->add_option("--period", period_flag, "target clock period in ps");
    run->add_option("--retries", pnr.retries, "placement seed attempts before giving up");
    run->add_option("-o,--output", pnr.out_dir, "output directory")->required();

    // longest-path
    LongestOptions lp;
    int64_t iters_flag = 0;
    auto *longest = app.add_subcommand("longest-path", "search for a longest simple routing path");
    longest->add_option("--db", lp.db_path, "device database")->required();
    longest->add_option("--in", lp.in_pad, "input pad name")->required();
    longest->add_option("--out", lp.out_pad, "output pad name")->required();
    longest->add_option("--budget", lp.budget_s, "wall-clock budget in seconds");
    auto *iters_opt = longest->add_option("--iters", iters_flag, "exact iteration count (overrides --budget)");
    longest->add_option("--seed", lp.seed, "search seed");
    longest->add_option("-o,--output", lp.out_dir, "output directory")->required();

    // svg
    std::string svg_design, svg_db, svg_out;
    auto *svg = app.add_subcommand("svg", "render a placed/routed design");
    svg->add_option("design", svg_design, "routed design JSON")->required();
    svg->add_option("--db", svg_db, "device database")->required();
    svg->add_option("-o,--output", svg_out, "output SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_arch(ap, arch_out);
        if (run->parsed()) {
            if (period_opt->count())
                pnr.period_ps = period_flag;
            return cmd_pnr(pnr);
        }
        if (longest->parsed()) {
            if (iters_opt->count())
                lp.iters = iters_flag;
            return cmd_longest_path(lp);
        }
        if (svg->parsed())
            return cmd_svg(svg_design, svg_db, svg_out);
    } catch (const CommandError &e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_BAD_INPUT;
    }
    return 0;
}
