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

#ifndef IPNR_BITGEN_HH
#define IPNR_BITGEN_HH

#include <optional>

#include "ipnr/design.hh"
#include "ipnr/techmap.hh"

namespace ipnr {

struct AuditFailed : Error
{
    using Error::Error;
};
struct DeviceMismatch : Error
{
    using Error::Error;
};
struct UnknownFeature : Error
{
    using Error::Error;
};
struct DuplicateFeature : Error
{
    using Error::Error;
};
struct BitstreamSyntaxError : Error
{
    using Error::Error;
};

// Per-bel configuration: LUT truth table and register enable for logic
// bels, direction for pads.
struct BelConfig
{
    std::optional<LutMask> init;
    bool ff_enable = false;
    std::optional<std::string> dir; // "in" or "out"
    friend bool operator==(const BelConfig &, const BelConfig &) = default;
};

// Everything the fabric needs to realize a design: the set of turned-on
// pips and the per-bel settings.
struct FabricConfig
{
    std::set<PipId> pips;
    std::map<BelId, BelConfig> bels;
    friend bool operator==(const FabricConfig &, const FabricConfig &) = default;
};

// Collect the configuration of a placed-and-routed design. Audits the
// placement and routing first; throws AuditFailed on any diagnostic.
FabricConfig extract_config(const DeviceDB &db, const Netlist &n, const Placement &placement,
                            const Routing &routing);

// Render a configuration as the textual bitstream: a fixed-format header
// carrying the device hash, then one sorted feature line per pip and per
// bel setting.
std::string render_bitstream(const DeviceDB &db, const FabricConfig &config);

// extract_config followed by render_bitstream.
std::string emit_bitstream(const DeviceDB &db, const Netlist &n, const Placement &placement,
                           const Routing &routing);

// Parse a bitstream back into a configuration, checking the header hash
// against `db` and every feature against the device.
FabricConfig parse_bitstream(const std::string &text, const DeviceDB &db);

} // namespace ipnr

#endif
