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

#include "ipnr/techmap.hh"

namespace ipnr {

LutMask LutMask::zeros(int w)
{
    LutMask m;
    m.width = w;
    m.bits.assign(size_t(1) << w, 0);
    return m;
}

LutMask LutMask::input_identity(int w, int k)
{
    LutMask m = zeros(w);
    for (size_t i = 0; i < m.bits.size(); i++)
        m.bits[i] = uint8_t((i >> k) & 1);
    return m;
}

LutMask LutMask::from_string(int w, const std::string &s)
{
    if (s.size() != (size_t(1) << w))
        throw BadMaskWidth("mask string length " + std::to_string(s.size()) + " does not match width " +
                           std::to_string(w));
    LutMask m = zeros(w);
    for (size_t j = 0; j < s.size(); j++) {
        if (s[j] != '0' && s[j] != '1')
            throw BadMaskWidth("mask string contains non-binary character");
        m.bits[s.size() - 1 - j] = uint8_t(s[j] - '0');
    }
    return m;
}

std::string LutMask::to_string() const
{
    std::string s(bits.size(), '0');
    for (size_t i = 0; i < bits.size(); i++)
        s[bits.size() - 1 - i] = char('0' + bits[i]);
    return s;
}

std::string LutMask::to_hex() const
{
    static const char digits[] = "0123456789ABCDEF";
    std::string s = "0x";
    size_t n = bits.size();
    if (n < 4) {
        unsigned v = 0;
        for (size_t i = 0; i < n; i++)
            v |= unsigned(bits[i]) << i;
        s += digits[v];
        return s;
    }
    for (size_t j = n; j >= 4; j -= 4) {
        unsigned v = 0;
        for (int b = 0; b < 4; b++)
            v |= unsigned(bits[j - 4 + size_t(b)]) << b;
        s += digits[v];
    }
    return s;
}

uint8_t eval_lut(const LutMask &mask, const std::vector<uint8_t> &inputs)
{
    if (int(inputs.size()) != mask.width)
        throw WidthMismatch("expected " + std::to_string(mask.width) + " inputs, got " +
                            std::to_string(inputs.size()));
    size_t idx = 0;
    for (size_t k = 0; k < inputs.size(); k++)
        idx |= size_t(inputs[k] ? 1 : 0) << k;
    return mask.bits[idx];
}

std::pair<LutMask, LutMask> split_lut_mask(const LutMask &mask)
{
    if (mask.width < 2)
        throw WidthTooSmall("cannot split a mask of width " + std::to_string(mask.width));
    size_t half = mask.bits.size() / 2;
    LutMask lo = LutMask::zeros(mask.width - 1), hi = LutMask::zeros(mask.width - 1);
    for (size_t i = 0; i < half; i++) {
        lo.bits[i] = mask.bits[i];
        hi.bits[i] = mask.bits[half + i];
    }
    return {lo, hi};
}

LutMask replicate_mask(const LutMask &mask, int target_width)
{
    if (target_width < mask.width)
        throw WidthMismatch("cannot shrink a mask by replication");
    LutMask out = LutMask::zeros(target_width);
    for (size_t i = 0; i < out.bits.size(); i++)
        out.bits[i] = mask.bits[i & (mask.bits.size() - 1)];
    return out;
}

LutMask mux_lut3_mask()
{
    LutMask m = LutMask::zeros(3);
    for (size_t i = 0; i < 8; i++) {
        uint8_t i0 = i & 1, i1 = (i >> 1) & 1, s = uint8_t((i >> 2) & 1);
        m.bits[i] = s ? i1 : i0;
    }
    return m; // 0xCA
}

namespace {

struct DecompCtx
{
    Netlist &out;
    const std::string &base;
    int K;
    bool allow_hard_mux;
    int32_t gnd_net;
    int next_lut = 0, next_mux = 0, next_net = 0;
    DecompStats stats;

    int32_t fresh_net() { return out.add_net(); }

    void emit_leaf(const std::string &name, const LutMask &mask, const std::vector<int32_t> &inputs, int32_t y)
    {
        LutMask widened = replicate_mask(mask, K);
        Cell c;
        c.type = "LUT_K";
        c.params["WIDTH"] = K;
        c.params["LUT"] = widened.to_string();
        for (int k = 0; k < K; k++) {
            int32_t net = k < int(inputs.size()) ? inputs[size_t(k)] : gnd_net;
            c.conns["A" + std::to_string(k)] = net;
        }
        c.conns["Y"] = y;
        out.cells.emplace(name, std::move(c));
    }

    void emit_mux(int32_t lo, int32_t hi, int32_t sel, int32_t y)
    {
        std::string name = base + "$mux" + std::to_string(next_mux++);
        stats.muxes++;
        if (allow_hard_mux) {
            Cell c;
            c.type = "MUX2";
            c.conns["I0"] = lo;
            c.conns["I1"] = hi;
            c.conns["S"] = sel;
            c.conns["Y"] = y;
            out.cells.emplace(name, std::move(c));
        } else {
            if (K < 3)
                throw WidthTooSmall("target LUT width " + std::to_string(K) + " cannot absorb a 2:1 mux");
            emit_leaf(name, mux_lut3_mask(), {lo, hi, sel}, y);
        }
    }

    int32_t recurse(const LutMask &mask, const std::vector<int32_t> &inputs, int32_t y)
    {
        if (mask.width <= K) {
            std::string name = base + "$lut" + std::to_string(next_lut++);
            stats.leaf_luts++;
            if (y < 0)
                y = fresh_net();
            emit_leaf(name, mask, inputs, y);
            return y;
        }
        auto [lo, hi] = split_lut_mask(mask);
        std::vector<int32_t> sub(inputs.begin(), inputs.end() - 1);
        int32_t lo_net = recurse(lo, sub, -1);
        int32_t hi_net = recurse(hi, sub, -1);
        if (y < 0)
            y = fresh_net();
        emit_mux(lo_net, hi_net, inputs.back(), y);
        return y;
    }
};

} // namespace

DecompStats decompose_lut(Netlist &out, const std::string &cell_name, const LutMask &mask,
                          const std::vector<int32_t> &input_nets, int32_t out_net, int K, bool allow_hard_mux,
                          int32_t gnd_net)
{
    if (int(input_nets.size()) != mask.width)
        throw WidthMismatch("input net count does not match mask width");
    DecompCtx ctx{out, cell_name, K, allow_hard_mux, gnd_net};
    ctx.recurse(mask, input_nets, out_net);
    return ctx.stats;
}

Netlist techmap_netlist(const Netlist &n, int K, bool allow_hard_mux)
{
    auto diags = validate(n);
    if (!diags.empty())
        throw Error("techmap input invalid: " + diags.front().str());

    Netlist out;
    out.top = n.top;
    out.ports = n.ports;
    out.attributes = n.attributes;
    out.num_nets = n.num_nets;

    int32_t gnd_net = -1;
    auto ensure_gnd = [&]() {
        if (gnd_net >= 0)
            return gnd_net;
        gnd_net = out.add_net();
        Cell c;
        c.type = "LUT_K";
        c.params["WIDTH"] = K;
        c.params["LUT"] = LutMask::zeros(K).to_string();
        c.conns["Y"] = gnd_net;
        out.cells.emplace("$gnd", std::move(c));
        return gnd_net;
    };

    for (const auto &[name, cell] : n.cells) {
        if (cell.type == "$dff" || cell.type == "PAD") {
            out.cells.emplace(name, cell);
            continue;
        }
        if (cell.type != "$lut")
            throw Error("techmap cannot handle cell '" + name + "' of kind '" + cell.type + "'");
        int w = cell.params.at("WIDTH").get<int>();
        LutMask mask = LutMask::from_string(w, cell.params.at("LUT").get<std::string>());
        std::vector<int32_t> inputs;
        for (int k = 0; k < w; k++) {
            auto it = cell.conns.find("A" + std::to_string(k));
            inputs.push_back(it != cell.conns.end() ? it->second : ensure_gnd());
        }
        // Padding inputs need a real net (leaf widening, or LUT3-lowered
        // muxes on K > 3 targets).
        if (w < K || (w > K && !allow_hard_mux && K > 3))
            ensure_gnd();
        int32_t y = cell.conns.at("Y");
        decompose_lut(out, name, mask, inputs, y, K, allow_hard_mux, gnd_net);
    }
    return out;
}

} // namespace ipnr
