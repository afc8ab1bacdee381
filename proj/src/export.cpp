#include "cwkb/export.hpp"

#include "cwkb/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cwkb {

namespace {

using nlohmann::ordered_json;

ordered_json meta_json(const ExportMeta& meta)
{
    return {{"tool", "cwkb"},
            {"version", tool_version},
            {"command", meta.command},
            {"config_digest", meta.digest},
            {"potential", meta.potential}};
}

ordered_json cjson(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json points_json(const std::vector<cplx>& v)
{
    auto arr = ordered_json::array();
    for (auto z : v)
        arr.push_back(cjson(z));
    return arr;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(const ExportMeta& meta)
{
    return "# cwkb " + std::string(tool_version) + " command=" + meta.command + " config_digest=" + meta.digest +
           " potential=" + meta.potential + "\n";
}

const char* kind_name(LineKind k) { return k == LineKind::stokes ? "stokes" : "anti_stokes"; }

const char* termination_name(Termination t)
{
    switch (t) {
    case Termination::hits_turning_point: return "hits_turning_point";
    case Termination::unbounded: return "unbounded";
    case Termination::max_length: return "max_length";
    }
    return "?";
}

}  // namespace

std::string graph_json(const StokesGraph& g, const ExportMeta& meta)
{
    ordered_json j;
    j["meta"] = meta_json(meta);
    auto tps = ordered_json::array();
    for (const auto& t : g.turning_points)
        tps.push_back({{"z", cjson(t.z)}, {"multiplicity", t.multiplicity}, {"real", t.is_real}});
    j["turning_points"] = tps;
    auto lines = ordered_json::array();
    for (const auto& l : g.lines) {
        auto acts = ordered_json::array();
        for (auto s : l.actions)
            acts.push_back(cjson(s));
        lines.push_back({{"kind", kind_name(l.kind)},
                         {"origin", cjson(l.origin.z)},
                         {"launch_angle", l.launch_angle},
                         {"termination", termination_name(l.termination)},
                         {"end_point", cjson(l.end_point)},
                         {"escape_angle", l.escape_angle},
                         {"nodes", points_json(l.nodes)},
                         {"actions", acts}});
    }
    j["lines"] = lines;
    auto segs = ordered_json::array();
    for (const auto& s : g.real_axis_segments)
        segs.push_back({{"a", s.a}, {"b", s.b}, {"kind", kind_name(s.kind)}});
    j["real_axis_segments"] = segs;
    j["summary"] = {{"finite", g.finite_count()}, {"unbounded", g.unbounded_count()}};
    return j.dump(1) + "\n";
}

std::string eigen_csv(const std::vector<EigenRecord>& recs, const RealLayout& lay, const ExportMeta& meta)
{
    std::string out = csv_header(meta);
    out += "n,lambda,miss_residual,bracket_lo,bracket_hi,parity,well,tag_tie,wkb_index,wkb_lambda,quantization_defect\n";
    for (const auto& r : recs) {
        out += std::to_string(r.n) + "," + num(r.lambda) + "," + num(r.miss_residual) + "," + num(r.lo) + "," +
               num(r.hi) + ",";
        out += r.parity ? std::to_string(*r.parity) : "";
        out += ",";
        if (r.well_tag && *r.well_tag >= 1 && *r.well_tag <= static_cast<int>(lay.well_actions.size())) {
            const double a = lay.well_actions[static_cast<std::size_t>(*r.well_tag - 1)];
            const double defect = quantization_defect(r.lambda, a);
            const double t = r.lambda * 2.0 * a / std::numbers::pi;
            const long k = std::lround((t - defect - 1.0) / 2.0);
            out += std::to_string(*r.well_tag) + "," + (r.tag_tie ? "1" : "0") + "," + std::to_string(k) + "," +
                   num((2.0 * k + 1.0) * std::numbers::pi / (2.0 * a)) + "," + num(defect);
        } else {
            out += ",,,,";
        }
        out += "\n";
    }
    return out;
}

std::string zeroset_json(const ZeroSet& zs, const ExportMeta& meta, const std::string& comparison)
{
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["lambda"] = zs.lambda;
    j["region"] = {zs.region.x0, zs.region.x1, zs.region.y0, zs.region.y1};
    j["region_winding"] = zs.region_winding;
    auto arr = ordered_json::array();
    for (const auto& z : zs.zeros)
        arr.push_back({{"re", z.z.real()}, {"im", z.z.imag()}, {"residual", z.residual}, {"verified", z.verified}});
    j["zeros"] = arr;
    if (!comparison.empty())
        j["comparison"] = comparison;
    return j.dump(1) + "\n";
}

std::string measure_csv(const MeasureReport& rep, const ExportMeta& meta)
{
    std::string out = csv_header(meta);
    out += "line,arc,from_re,from_im,to_re,to_im,predicted_mass,count,count_over_lambda,relative_error,excluded\n";
    for (const auto& a : rep.arcs)
        out += a.line + "," + std::to_string(a.arc) + "," + num(a.from.real()) + "," + num(a.from.imag()) + "," +
               num(a.to.real()) + "," + num(a.to.imag()) + "," + num(a.predicted_mass) + "," +
               std::to_string(a.count) + "," + num(a.count_over_lambda) + "," + num(a.relative_error) + "," +
               (a.excluded ? "1" : "0") + "\n";
    return out;
}

std::string measure_json(const MeasureReport& rep, const std::vector<PredictedZeroLine>& lines,
                         const std::vector<std::pair<std::string, LineFit>>& fits, const ExportMeta& meta)
{
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["lambda"] = rep.lambda;
    j["kappa"] = rep.kappa;
    j["tube_radius"] = rep.tube_radius;
    j["arc_mass"] = rep.arc_mass;
    j["matched"] = rep.matched;
    j["max_distance"] = rep.max_distance;
    j["max_relative_error"] = rep.max_relative_error;
    j["unmatched"] = points_json(rep.unmatched);
    j["unmatched_in_discs"] = rep.unmatched_in_discs;
    j["unmatched_outside_discs"] = rep.unmatched_outside_discs;
    auto ls = ordered_json::array();
    for (const auto& l : lines)
        ls.push_back({{"label", l.label},
                      {"set", l.set},
                      {"anchor", cjson(l.anchor_tp)},
                      {"offset_c", l.offset_c},
                      {"curve", points_json(l.curve)},
                      {"mass_density", l.mass_density}});
    j["lines"] = ls;
    auto fs = ordered_json::array();
    for (const auto& [label, f] : fits)
        fs.push_back({{"line", label},
                      {"c_fit", f.c_fit},
                      {"residual_rms", f.residual_rms},
                      {"median_gap", f.median_gap},
                      {"count", f.count}});
    j["fits"] = fs;
    return j.dump(1) + "\n";
}

std::string density_csv(const DensityReport& rep, const ExportMeta& meta)
{
    std::string out = csv_header(meta);
    out += "sequence,size,flagged,empirical,predicted,equidistributed,index_density_own,index_density_other\n";
    for (const auto& s : rep.sequences)
        out += std::to_string(s.sequence) + "," + std::to_string(s.size) + "," + std::to_string(s.flagged) + "," +
               num(s.empirical) + "," + num(s.predicted) + "," + num(s.equidistributed) + "," +
               (s.index_density_own ? num(*s.index_density_own) : "") + "," +
               (s.index_density_other ? num(*s.index_density_other) : "") + "\n";
    return out;
}

std::string density_json(const DensityReport& rep, const DoubleWellData& d, const ExportMeta& meta)
{
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["alpha1"] = d.alpha1;
    j["alpha2"] = d.alpha2;
    j["xi"] = d.xi;
    j["rho"] = rep.rho;
    j["classification"] = to_string(rep.form.cls);
    if (rep.form.cls != RatioClass::irrational_like)
        j["rational"] = {rep.form.p, rep.form.q};
    j["delta"] = rep.delta;
    j["count"] = rep.count;
    auto seqs = ordered_json::array();
    for (const auto& s : rep.sequences) {
        ordered_json e{{"sequence", s.sequence}, {"size", s.size}, {"flagged", s.flagged},
                       {"empirical", s.empirical}, {"predicted", s.predicted},
                       {"equidistributed", s.equidistributed}};
        if (s.index_density_own)
            e["index_density_own"] = *s.index_density_own;
        if (s.index_density_other)
            e["index_density_other"] = *s.index_density_other;
        seqs.push_back(e);
    }
    j["sequences"] = seqs;
    return j.dump(1) + "\n";
}

std::string calibration_json(const std::array<double, 4>& before, const std::array<double, 4>& after,
                             double target, double achieved, const ExportMeta& meta)
{
    ordered_json j;
    j["meta"] = meta_json(meta);
    j["roots_before"] = before;
    j["roots"] = after;
    j["target"] = target;
    j["ratio"] = achieved;
    return j.dump(1) + "\n";
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    if (!f)
        throw std::runtime_error("write failed for " + path);
}

}  // namespace cwkb
