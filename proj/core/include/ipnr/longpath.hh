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

#ifndef IPNR_LONGPATH_HH
#define IPNR_LONGPATH_HH

#include <optional>

#include "ipnr/design.hh"
#include "ipnr/timing.hh"

namespace ipnr {

struct BadPad : Error
{
    using Error::Error;
};
struct DisconnectedEndpoints : Error
{
    using Error::Error;
};
struct Unreachable : Error
{
    using Error::Error;
};
struct EmptyReachableSet : Error
{
    using Error::Error;
};
struct IllegalPath : Error
{
    using Error::Error;
};

// Single-use routing graph: device pips plus LUT route-throughs, with all
// IO resources removed except the two designated pads.
struct GraphEdge
{
    int32_t to = -1;
    int32_t delay_ps = 0;
    bool route_through = false;
    PipId pip;          // valid when !route_through
    BelId bel;          // valid when route_through
    int32_t input = -1; // LUT input index, when route_through
};

struct RoutingGraph
{
    std::vector<WireId> nodes; // dense node ids, canonical wire order
    std::vector<std::vector<GraphEdge>> adj;
    int32_t source = -1;
    int32_t sink = -1;

    int32_t node_count() const { return int32_t(nodes.size()); }
};

RoutingGraph build_routing_graph(const DeviceDB &db, const std::string &in_pad, const std::string &out_pad,
                                 const DelayModel &model = DelayModel{});

// The node set of the bulk-fabric strongly connected component: largest SCC
// that lies on some source-to-sink walk. Sorted node ids.
std::vector<int32_t> scc_reachable(const RoutingGraph &g, int32_t source, int32_t sink);

// Longest source-to-sink path in the DAG induced by keeping only edges that
// go forward in `order` (order[node] = rank). Maximizes edge count first,
// total delay second. Nullopt when the sink is unreachable in the DAG.
std::optional<std::vector<int32_t>> dag_longest_path(const RoutingGraph &g, const std::vector<int32_t> &order,
                                                     int32_t source, int32_t sink);

struct LongestPathResult
{
    std::vector<int32_t> path; // node ids, source first
    int64_t t_delay_ps = 0;
    double f_wires = 0.0;
    double budget_used_s = 0.0;
    int64_t iterations = 0;
    uint64_t seed = 0;
};

struct LongPathConfig
{
    double budget_s = 1.0;
    std::optional<int64_t> max_iters; // deterministic mode: exact DP count
    uint64_t seed = 1;
    int32_t stagnation_limit = 200; // accepted-move-free steps before restart
};

// Anytime heuristic: pseudo-topological orderings with successive
// relaxation (block moves of backward-edge heads), seeded restarts.
LongestPathResult longest_simple_path(const RoutingGraph &g, const LongPathConfig &cfg = LongPathConfig{});

// Fraction of the reachable set visited by the path, the saturation metric.
double fwires(const std::vector<int32_t> &path, const std::vector<int32_t> &reachable);

// A found path lowered to a legal placed-and-routed single-chain design:
// one PAD cell per endpoint, one identity-configured LUTFF per
// route-through, one routed net per pip segment.
struct LoweredDesign
{
    Netlist netlist;
    Placement placement;
    Routing routing;
};

LoweredDesign path_to_routing(const DeviceDB &db, const RoutingGraph &g, const std::vector<int32_t> &path,
                              const std::string &in_pad, const std::string &out_pad);

} // namespace ipnr

#endif
