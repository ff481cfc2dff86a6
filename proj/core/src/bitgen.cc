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

#include "ipnr/bitgen.hh"

#include <algorithm>
#include <sstream>

#include "ipnr/place.hh"
#include "ipnr/route.hh"

namespace ipnr {

namespace {

constexpr const char *FORMAT_TAG = "ipnr-fasm-1";

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

// Inverse of LutMask::to_hex for widths >= 2 (at least one full nibble).
std::optional<LutMask> mask_from_hex(int width, const std::string &s)
{
    size_t n = size_t(1) << width;
    if (s.size() != 2 + n / 4 || s[0] != '0' || s[1] != 'x')
        return std::nullopt;
    LutMask m = LutMask::zeros(width);
    for (size_t t = 0; t < n / 4; t++) {
        int v = hex_value(s[2 + t]);
        if (v < 0)
            return std::nullopt;
        size_t j = n - 4 * (t + 1);
        for (int b = 0; b < 4; b++)
            m.bits[j + size_t(b)] = uint8_t((v >> b) & 1);
    }
    return m;
}

std::string init_key(const DeviceDB &db)
{
    return str_format("INIT[%d:0]", (1 << db.params.lut_inputs) - 1);
}

std::string trimmed(const std::string &line)
{
    std::string s = line.substr(0, line.find('#'));
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

FabricConfig extract_config(const DeviceDB &db, const Netlist &n, const Placement &placement,
                            const Routing &routing)
{
    auto pdiags = audit_placement(db, n, placement, PlaceConstraints{});
    if (!pdiags.empty())
        throw AuditFailed("placement audit failed: " + pdiags.front());
    auto rdiags = audit_routing(db, n, placement, routing);
    if (!rdiags.empty())
        throw AuditFailed("routing audit failed: " + rdiags.front());

    FabricConfig cfg;
    for (const auto &[net, tree] : routing.nets)
        for (const auto &[sink, walk] : tree.sinks)
            for (PipId p : walk)
                cfg.pips.insert(p);

    for (const auto &[name, cell] : n.cells) {
        auto it = placement.cells.find(name);
        if (it == placement.cells.end())
            continue;
        BelConfig bc;
        if (cell.type == "LUTFF") {
            int w = cell.params.at("WIDTH").get<int>();
            // Fabric LUTs are always K wide; narrower masks are replicated
            // so the unused high inputs become don't-care.
            bc.init = replicate_mask(LutMask::from_string(w, cell.params.at("LUT").get<std::string>()),
                                     db.params.lut_inputs);
            bc.ff_enable = cell.params.at("FF_ENABLE").get<int>() != 0;
        } else if (cell.type == "PAD") {
            bc.dir = cell.params.at("DIR").get<std::string>();
        } else {
            continue;
        }
        cfg.bels.emplace(it->second, bc);
    }
    return cfg;
}

std::string render_bitstream(const DeviceDB &db, const FabricConfig &config)
{
    std::vector<std::string> lines;
    for (PipId p : config.pips)
        lines.push_back(db.pip_name(p));
    for (const auto &[bel, bc] : config.bels) {
        std::string base = db.bel_name(bel);
        if (bc.init)
            lines.push_back(base + "." + init_key(db) + " = " + bc.init->to_hex());
        if (bc.ff_enable)
            lines.push_back(base + ".FF_ENABLE");
        if (bc.dir)
            lines.push_back(base + ".DIR = " + *bc.dir);
    }
    std::sort(lines.begin(), lines.end());

    std::string out;
    out += std::string(".format ") + FORMAT_TAG + "\n";
    out += str_format(".device %016llx\n", (unsigned long long)db.device_hash());
    for (const auto &l : lines)
        out += l + "\n";
    return out;
}

std::string emit_bitstream(const DeviceDB &db, const Netlist &n, const Placement &placement,
                           const Routing &routing)
{
    return render_bitstream(db, extract_config(db, n, placement, routing));
}

FabricConfig parse_bitstream(const std::string &text, const DeviceDB &db)
{
    // Feature lookup tables for the whole device; small fabrics keep this
    // cheap and it makes every name check exact.
    std::map<std::string, PipId> pip_by_name;
    for (int y = 0; y < db.height(); y++)
        for (int x = 0; x < db.width(); x++)
            for (size_t i = 0; i < db.tile(x, y).pips.size(); i++) {
                PipId p{int16_t(x), int16_t(y), int32_t(i)};
                if (db.pip_exists(p))
                    pip_by_name.emplace(db.pip_name(p), p);
            }
    std::map<std::string, BelId> bel_by_name;
    for (BelId b : db.all_bels())
        bel_by_name.emplace(db.bel_name(b), b);

    FabricConfig cfg;
    bool saw_format = false, saw_device = false;
    std::set<std::string> seen_settings; // "<bel>.<kind>" dedup keys

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        lineno++;
        std::string line = trimmed(raw);
        if (line.empty())
            continue;
        auto fail = [&](const std::string &what) {
            return BitstreamSyntaxError(str_format("line %d: %s", lineno, what.c_str()));
        };

        if (line[0] == '.') {
            if (line.rfind(".format ", 0) == 0) {
                if (line.substr(8) != FORMAT_TAG)
                    throw fail("unsupported format '" + line.substr(8) + "'");
                saw_format = true;
            } else if (line.rfind(".device ", 0) == 0) {
                std::string want = str_format("%016llx", (unsigned long long)db.device_hash());
                if (line.substr(8) != want)
                    throw DeviceMismatch("bitstream targets device " + line.substr(8) +
                                         ", not " + want);
                saw_device = true;
            } else {
                throw fail("unknown directive");
            }
            continue;
        }
        if (!saw_format || !saw_device)
            throw fail("feature line before header");

        std::string key = line, value;
        if (auto eq = line.find(" = "); eq != std::string::npos) {
            key = line.substr(0, eq);
            value = line.substr(eq + 3);
        }

        if (auto it = pip_by_name.find(key); it != pip_by_name.end()) {
            if (!value.empty())
                throw fail("pip feature takes no value");
            if (!cfg.pips.insert(it->second).second)
                throw DuplicateFeature("duplicate pip feature '" + key + "'");
            continue;
        }

        auto dot = key.rfind('.');
        if (dot == std::string::npos)
            throw UnknownFeature("unknown feature '" + key + "'");
        std::string bel_part = key.substr(0, dot), setting = key.substr(dot + 1);
        auto bit = bel_by_name.find(bel_part);
        if (bit == bel_by_name.end())
            throw UnknownFeature("unknown feature '" + key + "'");
        BelId bel = bit->second;
        BelConfig &bc = cfg.bels[bel];

        if (setting == init_key(db) && db.bel_kind(bel) == BelKind::LUTFF) {
            if (!seen_settings.insert(bel_part + ".INIT").second)
                throw DuplicateFeature("duplicate INIT for " + bel_part);
            auto mask = mask_from_hex(db.params.lut_inputs, value);
            if (!mask)
                throw fail("bad INIT value '" + value + "'");
            bc.init = *mask;
        } else if (setting == "FF_ENABLE" && db.bel_kind(bel) == BelKind::LUTFF) {
            if (!value.empty())
                throw fail("FF_ENABLE takes no value");
            if (!seen_settings.insert(bel_part + ".FF_ENABLE").second)
                throw DuplicateFeature("duplicate FF_ENABLE for " + bel_part);
            bc.ff_enable = true;
        } else if (setting == "DIR" && db.bel_kind(bel) == BelKind::PAD) {
            if (value != "in" && value != "out")
                throw fail("bad DIR value '" + value + "'");
            if (!seen_settings.insert(bel_part + ".DIR").second)
                throw DuplicateFeature("duplicate DIR for " + bel_part);
            bc.dir = value;
        } else {
            throw UnknownFeature("unknown feature '" + key + "'");
        }
    }
    if (!saw_format || !saw_device)
        throw BitstreamSyntaxError("missing bitstream header");
    return cfg;
}

} // namespace ipnr
