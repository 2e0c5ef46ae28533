#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "radpl/mountain_pass.hpp"

namespace radpl {

using json = nlohmann::json;

namespace detail {

/// Shortest-round-trip double formatting for CSV/SVG: deterministic and
/// lossless (matches the JSON emitter's behavior).
inline std::string fmt(double x) {
    char buf[40];
    if (x == std::floor(x) && std::abs(x) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
            std::sscanf(shorter, "%lf", &back);
            if (back == x) return shorter;
        }
    }
    return buf;
}

}  // namespace detail

inline json params_to_json(const ProblemParams& pp) {
    return json{{"p", pp.p},     {"q", pp.q},   {"N", pp.N},
                {"ell", pp.ell}, {"s0", pp.s0}, {"c_emb", pp.c_emb}};
}

inline json record_to_json(const SolutionRecord& rec, const ProblemParams& pp,
                           const RadialGrid& grid) {
    json j;
    j["schema"] = 1;
    j["params"] = params_to_json(pp);
    j["grid"] = json{{"M", grid.M()}, {"type", "uniform"}};
    j["values"] = rec.u;
    j["energy"] = rec.energy;
    j["nehari_residual"] = rec.nehari_residual;
    j["grad_norm"] = rec.grad_norm;
    j["u0"] = rec.u0;
    j["u1"] = rec.u1;
    j["provenance"] = to_string(rec.provenance);
    return j;
}

inline SolutionRecord record_from_json(const json& j) {
    if (j.at("schema").get<int>() != 1)
        throw std::runtime_error("record_from_json: unsupported schema");
    SolutionRecord rec;
    rec.u = j.at("values").get<RadialField>();
    rec.q = j.at("params").at("q").get<double>();
    rec.energy = j.at("energy").get<double>();
    rec.nehari_residual = j.at("nehari_residual").get<double>();
    rec.grad_norm = j.at("grad_norm").get<double>();
    rec.u0 = j.at("u0").get<double>();
    rec.u1 = j.at("u1").get<double>();
    const std::string prov = j.at("provenance").get<std::string>();
    if (prov == "variational")
        rec.provenance = Provenance::variational;
    else if (prov == "shooting")
        rec.provenance = Provenance::shooting;
    else if (prov == "mountain_pass")
        rec.provenance = Provenance::mountain_pass;
    else
        throw std::runtime_error("record_from_json: unknown provenance " + prov);
    return rec;
}

inline std::string branch_csv(const Branch& br) {
    std::string out = "q,d,u_end,energy,label\n";
    for (const BranchPoint& pt : br.points) {
        out += detail::fmt(pt.q);
        out += ',';
        out += detail::fmt(pt.d);
        out += ',';
        out += detail::fmt(pt.u_end);
        out += ',';
        out += detail::fmt(pt.energy);
        out += ',';
        out += pt.label;
        out += '\n';
    }
    return out;
}

inline std::string asymptotic_csv(const std::vector<AsymptoticRow>& rows) {
    std::string out = "q,c_q,sup_dist_G,w1p_uq,h_q_G\n";
    for (const AsymptoticRow& r : rows) {
        out += detail::fmt(r.q);
        out += ',';
        out += detail::fmt(r.c_q);
        out += ',';
        out += detail::fmt(r.sup_dist_G);
        out += ',';
        out += detail::fmt(r.w1p_uq);
        out += ',';
        out += detail::fmt(r.h_q_G);
        out += '\n';
    }
    return out;
}

inline std::string dq_history_csv(const DqEstimate& est) {
    std::string out = "sweep,box_max\n";
    for (std::size_t k = 0; k < est.max_history.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += detail::fmt(est.max_history[k]);
        out += '\n';
    }
    return out;
}

inline json surface_to_json(const PathSurface& sf) {
    json j;
    j["schema"] = 1;
    j["t_nodes"] = sf.t_nodes;
    j["s_nodes"] = sf.s_nodes;
    j["boundary_frozen"] = sf.boundary_frozen;
    json fields = json::array();
    for (const RadialField& f : sf.fields) fields.push_back(f);
    j["fields"] = fields;
    return j;
}

/**
 * Bifurcation plot: u(0) against q, one polyline per label, the constant
 * family drawn as a dashed gray line at height 1. Pure string assembly,
 * byte-identical across reruns with the same branch.
 */
inline std::string branch_svg(const Branch& br) {
    constexpr double W = 640.0, H = 480.0;
    constexpr double ml = 64.0, mr = 20.0, mt = 20.0, mb = 48.0;

    double q_lo = 1e300, q_hi = -1e300, d_hi = 1.05;
    for (const BranchPoint& pt : br.points) {
        q_lo = std::min(q_lo, pt.q);
        q_hi = std::max(q_hi, pt.q);
        d_hi = std::max(d_hi, pt.d * 1.05);
    }
    if (br.points.empty()) {
        q_lo = 0.0;
        q_hi = 1.0;
    }
    if (q_hi <= q_lo) q_hi = q_lo + 1.0;

    auto sx = [&](double q) { return ml + (q - q_lo) / (q_hi - q_lo) * (W - ml - mr); };
    auto sy = [&](double d) { return H - mb - d / d_hi * (H - mt - mb); };

    std::string s;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
    s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";

    // axes
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) +
         "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
         "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double q = q_lo + (q_hi - q_lo) * k / 5.0;
        const double d = d_hi * k / 5.0;
        char lab[32];
        s += "<line x1=\"" + num(sx(q)) + "\" y1=\"" + num(H - mb) + "\" x2=\"" +
             num(sx(q)) + "\" y2=\"" + num(H - mb + 5) + "\" stroke=\"black\"/>\n";
        std::snprintf(lab, sizeof lab, "%.3g", q);
        s += "<text x=\"" + num(sx(q)) + "\" y=\"" + num(H - mb + 20) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + lab + "</text>\n";
        s += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(sy(d)) + "\" x2=\"" + num(ml) +
             "\" y2=\"" + num(sy(d)) + "\" stroke=\"black\"/>\n";
        std::snprintf(lab, sizeof lab, "%.3g", d);
        s += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(sy(d) + 4) +
             "\" font-size=\"12\" text-anchor=\"end\">" + lab + "</text>\n";
    }
    s += "<text x=\"" + num((ml + W - mr) / 2) + "\" y=\"" + num(H - 10) +
         "\" font-size=\"14\" text-anchor=\"middle\">q</text>\n";
    s += "<text x=\"16\" y=\"" + num((mt + H - mb) / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((mt + H - mb) / 2) + ")\">u(0)</text>\n";

    // constant family
    s += "<line x1=\"" + num(sx(q_lo)) + "\" y1=\"" + num(sy(1.0)) + "\" x2=\"" +
         num(sx(q_hi)) + "\" y2=\"" + num(sy(1.0)) +
         "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";

    const std::pair<std::string, std::string> styles[] = {
        {"lower", "#1f77b4"}, {"upper", "#d62728"}, {"constant", "#888888"}};
    for (const auto& [label, color] : styles) {
        std::string pts;
        for (const BranchPoint& pt : br.points)
            if (pt.label == label) pts += num(sx(pt.q)) + "," + num(sy(pt.d)) + " ";
        if (pts.empty()) continue;
        if (label != "constant")
            s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" "
                 "points=\"" + pts + "\"/>\n";
        for (const BranchPoint& pt : br.points)
            if (pt.label == label)
                s += "<circle cx=\"" + num(sx(pt.q)) + "\" cy=\"" + num(sy(pt.d)) +
                     "\" r=\"2\" fill=\"" + color + "\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

}  // namespace radpl
