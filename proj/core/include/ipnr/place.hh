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

#ifndef IPNR_PLACE_HH
#define IPNR_PLACE_HH

#include <optional>

#include "ipnr/design.hh"
#include "ipnr/timing.hh"

namespace ipnr {

struct InsufficientCapacity : Error
{
    using Error::Error;
};
struct UnsatisfiableConstraint : Error
{
    using Error::Error;
};
struct UnanchoredComponent : Error
{
    using Error::Error;
};
struct ConstraintSyntaxError : Error
{
    using Error::Error;
};

// Rectangular region constraint: matching cells must stay inside
// [x0,x1] x [y0,y1] (inclusive tile coordinates).
struct Region
{
    std::string glob; // '*' wildcard pattern over cell names
    int32_t x0, y0, x1, y1;
};

struct PlaceConstraints
{
    std::map<std::string, std::string> set_io; // cell/port name -> pad name
    std::vector<Region> regions;
};

// Lines: "set_io <port> <pad>", "region <glob> x0 y0 x1 y1", "#" comments.
PlaceConstraints parse_pcf(const std::string &text);

bool glob_match(const std::string &pattern, const std::string &name);

// Half-perimeter wirelength over tile coordinates of placed cell pins.
// Clock nets and top-port pins carry no position and are excluded.
double hpwl(const DeviceDB &db, const Netlist &n, const Placement &p);

// Seeded random valid placement honoring all constraints.
Placement initial_placement(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, uint64_t seed);

struct SAConfig
{
    std::optional<double> initial_temp; // default: auto from probe moves
    double gamma = 0.95;                // cooling factor per level
    int32_t moves_per_cell = 10;        // moves per temperature per movable cell
    double lambda = 0.5;                // timing weight in [0,1]
    uint64_t seed = 1;
};

Placement sa_place(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, const SAConfig &cfg,
                   const DelayModel &model = DelayModel{});

// One pin of an abstract one-dimensional net: either movable variable
// `var` or a fixed coordinate (var < 0, position in `pos`).
struct B2BPin
{
    int32_t var = -1;
    double pos = 0.0;
};

// Bound-to-bound quadratic wirelength minimization along one axis, solved
// by conjugate gradient. Weights are built from `init`; variables with no
// springs keep their initial value.
std::vector<double> b2b_solve_axis(int32_t num_vars, const std::vector<std::vector<B2BPin>> &nets,
                                   const std::vector<double> &init, double tolerance = 1e-6,
                                   int32_t max_iters = 1000);

struct AnalyticConfig
{
    double tolerance = 1e-6;
    int32_t max_solver_iters = 1000;
    int32_t spread_iters = 4;
    int32_t legalize_radius = 64; // max ring distance during legalization
    uint64_t seed = 1;
};

Placement heap_place(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, const AnalyticConfig &cfg,
                     const DelayModel &model = DelayModel{});

// Full placement audit: injectivity, bel validity, kind match, constraint
// compliance, completeness. Empty result means legal.
std::vector<std::string> audit_placement(const DeviceDB &db, const Netlist &n, const Placement &p,
                                         const PlaceConstraints &cons);

// Timing part of the SA objective: sum over sink pins of
// criticality * estimated source-to-sink delay.
double timing_cost(const DeviceDB &db, const Netlist &n, const Placement &p, const DelayModel &model,
                   const std::map<PinKey, double> &criticality);

} // namespace ipnr

#endif
