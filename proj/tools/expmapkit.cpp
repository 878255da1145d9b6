// expmapkit command-line tool: rendering, ray export, itinerary reports,
// parameter classification and the verification harness.
//
// Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
// 4 precondition-class failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "expmapkit/expmapkit.hpp"

using nlohmann::json;
using namespace expmapkit;

namespace {

constexpr int kResolutionCap = 8192;

struct Options {
    double a_re = 0.0, a_im = 0.0;
    std::string out;
    std::uint64_t seed = 20260824;
    int budget_n = 400;
    double threshold_T = 50.0;

    double re_lo = -4.0, re_hi = 4.0, im_lo = -4.0, im_hi = 4.0;
    int width = 256, height = 256;

    std::string address = "const:0";
    double t_lo = 0.5, t_hi = 10.0;
    double t = 3.0;
    int count = 50;
    int depth = 0;  // 0 = auto per potential

    double z_re = 0.0, z_im = 0.0;
    bool have_point = false;
    int m = 10;
    int K = 8;

    std::string suite = "all";
    std::uint64_t elementary_n = 100000;
    std::uint64_t tower_n = 10000;
    std::uint64_t equivariance_n = 2000;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--a-re", o.a_re, "Re a");
    sub->add_option("--a-im", o.a_im, "Im a");
    sub->add_option("--out", o.out, "output path (prefix for multi-file)");
    sub->add_option("--seed", o.seed, "seed for randomized suites");
    sub->add_option("--budget-n", o.budget_n, "iteration budget n_max");
    sub->add_option("--threshold-T", o.threshold_T, "escape threshold T");
    sub->set_config("--config", "", "flat key=value config file");
}

void add_box(CLI::App* sub, Options& o) {
    sub->add_option("--re-lo", o.re_lo);
    sub->add_option("--re-hi", o.re_hi);
    sub->add_option("--im-lo", o.im_lo);
    sub->add_option("--im-hi", o.im_hi);
    sub->add_option("--width", o.width);
    sub->add_option("--height", o.height);
}

void check_box(const Options& o) {
    if (!(o.re_lo < o.re_hi && o.im_lo < o.im_hi))
        throw InvalidInput("box bounds must satisfy lo < hi");
    if (o.width < 1 || o.height < 1 || o.width > kResolutionCap ||
        o.height > kResolutionCap)
        throw InvalidInput("resolution out of range");
    if (!(o.threshold_T >= 20.0)) throw InvalidInput("threshold T too small");
    if (o.budget_n < 1) throw InvalidInput("budget-n must be positive");
}

void emit(const Options& o, const json& doc, const std::string& suffix) {
    std::string text = doc.dump(2);
    text.push_back('\n');
    if (o.out.empty())
        std::cout << text;
    else
        write_file(o.out + suffix, text);
}

json strip_to_json(const StripIndex& s) {
    json j{{"k", s.k}, {"ambiguous", s.ambiguous}};
    if (s.ambiguous) j["k_other"] = s.k_other;
    return j;
}

const char* truncation_name(TruncationReason r) {
    switch (r) {
        case TruncationReason::OrbitLeftTracedRegion:
            return "orbit_left_traced_region";
        case TruncationReason::Escaped:
            return "escaped";
        default:
            return "budget_exhausted";
    }
}

json class_to_json(const ParameterClass& c) {
    if (const auto* s = std::get_if<SingularEscapes>(&c))
        return {{"kind", "SingularEscapes"}, {"escape_step", s->escape_step}};
    if (const auto* cyc = std::get_if<AttractingCycle>(&c))
        return {{"kind", "AttractingCycle"},
                {"period", cyc->period},
                {"multiplier_modulus", cyc->multiplier_modulus}};
    const auto& u = std::get<Undetermined>(c);
    return {{"kind", "Undetermined"}, {"n_max", u.n_max}, {"p_max", u.p_max}};
}

json prediction_to_json(const ConnectivityPrediction& p) {
    const char* v = p.verdict == Connectivity::Connected      ? "Connected"
                    : p.verdict == Connectivity::Disconnected ? "Disconnected"
                                                              : "Unknown";
    return {{"verdict", v}, {"conditional", p.conditional}};
}

json suite_to_json(const SuiteResult& r) {
    return {{"name", r.name},
            {"samples", r.samples},
            {"violations", r.violations},
            {"worst_slack", r.worst_slack},
            {"pass", r.pass}};
}

int cmd_render(const Options& o) {
    check_box(o);
    Parameter a(o.a_re, o.a_im);
    Box box{o.re_lo, o.re_hi, o.im_lo, o.im_hi};
    EscapeGrid g =
        escape_grid(a, box, o.width, o.height, o.budget_n, o.threshold_T);

    std::size_t black = 0;
    for (std::uint32_t v : g.cells)
        if (v == kNotEscaped) ++black;
    auto esc = label_components(g, CellClass::Escaping, 8);
    auto non = label_components(g, CellClass::NonEscaping, 4);

    json stats{
        {"schema", "expmapkit/1"},
        {"command", "render"},
        {"a", {o.a_re, o.a_im}},
        {"box", {box.re_lo, box.re_hi, box.im_lo, box.im_hi}},
        {"width", o.width},
        {"height", o.height},
        {"n_max", o.budget_n},
        {"T", o.threshold_T},
        {"black_fraction",
         static_cast<double>(black) / static_cast<double>(g.cells.size())},
        {"escaping_components", esc.count},
        {"non_escaping_components", non.count},
    };
    if (esc.count > 0)
        stats["largest_escaping_component"] =
            esc.sizes_by_id[static_cast<std::size_t>(esc.ids_by_size[0])];
    if (non.count > 0)
        stats["largest_non_escaping_component"] =
            non.sizes_by_id[static_cast<std::size_t>(non.ids_by_size[0])];

    if (o.out.empty()) throw InvalidInput("render: --out is required");
    {
        std::ostringstream os(std::ios::binary);
        write_ppm(os, g);
        write_file(o.out + ".ppm", os.str());
    }
    emit(o, stats, ".json");
    return 0;
}

int cmd_ray(const Options& o) {
    Parameter a(o.a_re, o.a_im);
    ExternalAddress addr = ExternalAddress::parse(o.address);
    RayPolyline line =
        trace_polyline(a, addr, o.t_lo, o.t_hi, o.count, o.depth);

    double max_residual = 0.0;
    for (const auto& s : line.samples)
        max_residual = std::max(max_residual, s.residual);
    json doc{{"schema", "expmapkit/1"},
             {"command", "ray"},
             {"a", {o.a_re, o.a_im}},
             {"address", addr.to_string()},
             {"t_lo", o.t_lo},
             {"t_hi", o.t_hi},
             {"count", o.count},
             {"max_residual", max_residual}};

    if (o.out.empty()) throw InvalidInput("ray: --out is required");
    {
        std::ostringstream os;
        write_polyline_csv(os, line);
        write_file(o.out + ".csv", os.str());
    }
    emit(o, doc, ".json");
    return 0;
}

// Shared by itinerary and kneading: partition from the traced singular ray.
Partition build_reference_partition(const Parameter& a, const Options& o) {
    SingularRayBudget b;
    b.n_max = o.budget_n;
    b.T = o.threshold_T;
    return build_partition(a, singular_ray(a, b), o.K);
}

int report_itinerary(const Options& o, Complex z, const char* command) {
    Parameter a(o.a_re, o.a_im);
    Partition part = build_reference_partition(a, o);
    Itinerary it = itinerary(part, z, o.m);

    json entries = json::array();
    for (const auto& e : it.entries) entries.push_back(strip_to_json(e));
    json doc{{"schema", "expmapkit/1"},
             {"command", command},
             {"a", {o.a_re, o.a_im}},
             {"z", {z.real(), z.imag()}},
             {"m", o.m},
             {"entries", entries},
             {"truncation", truncation_name(it.reason)},
             {"constants",
              {{"M", part.M()}, {"alpha", part.alpha()}, {"R", part.R()}}}};
    if (!it.entries.empty()) doc["x_star"] = minimal_exp_bound(it);
    int p_max = std::max(1, static_cast<int>(it.entries.size()) / 3);
    try {
        auto period = periodicity_check(it, p_max);
        doc["periodicity"] =
            period ? json(*period) : json(nullptr);
    } catch (const PrefixTooShort&) {
        doc["periodicity"] = nullptr;
    }
    emit(o, doc, o.out.empty() ? "" : ".json");
    return 0;
}

int cmd_itinerary(const Options& o) {
    Complex z(o.z_re, o.z_im);
    if (!o.have_point) {
        Parameter a(o.a_re, o.a_im);
        ExternalAddress addr = ExternalAddress::parse(o.address);
        z = trace_ray(a, addr, o.t, o.depth > 0 ? o.depth
                                                : default_trace_depth(o.t))
                .z;
    }
    return report_itinerary(o, z, "itinerary");
}

int cmd_kneading(const Options& o) {
    return report_itinerary(o, Complex(o.a_re, o.a_im), "kneading");
}

int cmd_classify(const Options& o) {
    Parameter a(o.a_re, o.a_im);
    ParameterClass c = classify_parameter(a, o.budget_n, 8, o.budget_n / 2,
                                          1e-6, o.threshold_T);
    json doc{{"schema", "expmapkit/1"},
             {"command", "classify"},
             {"a", {o.a_re, o.a_im}},
             {"class", class_to_json(c)},
             {"prediction", prediction_to_json(predict_connectivity(c))}};
    emit(o, doc, o.out.empty() ? "" : ".json");
    return 0;
}

int cmd_probe(const Options& o) {
    check_box(o);
    Parameter a(o.a_re, o.a_im);
    Box box{o.re_lo, o.re_hi, o.im_lo, o.im_hi};
    EscapeGrid g =
        escape_grid(a, box, o.width, o.height, o.budget_n, o.threshold_T);

    json doc{{"schema", "expmapkit/1"},
             {"command", "probe"},
             {"a", {o.a_re, o.a_im}},
             {"box", {box.re_lo, box.re_hi, box.im_lo, box.im_hi}},
             {"width", o.width},
             {"height", o.height},
             {"n_max", o.budget_n},
             {"T", o.threshold_T},
             // Finite-budget result: a witness separates escaping cells at
             // grid scale only and asserts nothing about the true plane.
             {"asserting", false}};
    try {
        auto w = disconnection_witness(g);
        if (w) {
            doc["witness"] = {
                {"found", true},
                {"sound", witness_sound(g, *w)},
                {"blocker_cells", w->blocker_cells.size()},
                {"separated_a", {w->separated_a.first, w->separated_a.second}},
                {"separated_b", {w->separated_b.first, w->separated_b.second}},
                {"touches_boundary", w->touches_boundary}};
        } else {
            doc["witness"] = {{"found", false}};
        }
    } catch (const InvalidInput&) {
        doc["witness"] = {{"found", false}};
    }

    if (!o.out.empty()) {
        std::ostringstream os(std::ios::binary);
        write_xgrid(os, g);
        write_file(o.out + ".xgrid", os.str());
    }
    emit(o, doc, o.out.empty() ? "" : ".json");
    return 0;
}

int cmd_verify(const Options& o) {
    std::vector<SuiteResult> results;
    auto want = [&](const char* name) {
        return o.suite == "all" || o.suite == name;
    };
    if (want("elementary"))
        results.push_back(verify_elementary(o.seed, o.elementary_n));
    if (want("sandwich")) results.push_back(verify_sandwich());
    if (want("expbound")) results.push_back(verify_exp_bound());
    if (want("tower")) results.push_back(verify_tower(o.seed + 1, o.tower_n));
    if (want("equivariance"))
        results.push_back(verify_equivariance(o.seed + 2, o.equivariance_n));
    if (results.empty()) throw InvalidInput("verify: unknown suite " + o.suite);

    bool all_pass = true;
    json suites = json::array();
    for (const auto& r : results) {
        suites.push_back(suite_to_json(r));
        all_pass = all_pass && r.pass;
    }
    json doc{{"schema", "expmapkit/1"},
             {"command", "verify"},
             {"seed", o.seed},
             {"suites", suites},
             {"pass", all_pass}};
    emit(o, doc, o.out.empty() ? "" : ".json");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential-family dynamics toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* render = app.add_subcommand("render", "escape-time image + stats");
    add_common(render, o);
    add_box(render, o);

    auto* ray = app.add_subcommand("ray", "trace a dynamic ray to CSV");
    add_common(ray, o);
    ray->add_option("--address", o.address, "external address spec");
    ray->add_option("--t-lo", o.t_lo);
    ray->add_option("--t-hi", o.t_hi);
    ray->add_option("--count", o.count);
    ray->add_option("--depth", o.depth, "pullback depth (0 = auto)");

    auto* itin = app.add_subcommand("itinerary", "itinerary report");
    add_common(itin, o);
    auto* zre = itin->add_option("--z-re", o.z_re, "Re of the point");
    itin->add_option("--z-im", o.z_im, "Im of the point");
    itin->add_option("--address", o.address, "ray address (if no point)");
    itin->add_option("--t", o.t, "ray potential (if no point)");
    itin->add_option("--depth", o.depth);
    itin->add_option("-m,--m", o.m, "prefix length");
    itin->add_option("-K,--K", o.K, "boundary curves per side");

    auto* knead = app.add_subcommand("kneading", "kneading-sequence report");
    add_common(knead, o);
    knead->add_option("-m,--m", o.m, "prefix length");
    knead->add_option("-K,--K", o.K, "boundary curves per side");

    auto* classify = app.add_subcommand("classify", "parameter classification");
    add_common(classify, o);

    auto* probe = app.add_subcommand("probe", "escape grid + witness search");
    add_common(probe, o);
    add_box(probe, o);

    auto* verify = app.add_subcommand("verify", "property suites");
    add_common(verify, o);
    verify->add_option("--suite", o.suite,
                       "all|elementary|sandwich|expbound|tower|equivariance");
    verify->add_option("--elementary-n", o.elementary_n);
    verify->add_option("--tower-n", o.tower_n);
    verify->add_option("--equivariance-n", o.equivariance_n);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    o.have_point = zre->count() > 0;
    try {
        if (render->parsed()) return cmd_render(o);
        if (ray->parsed()) return cmd_ray(o);
        if (itin->parsed()) return cmd_itinerary(o);
        if (knead->parsed()) return cmd_kneading(o);
        if (classify->parsed()) return cmd_classify(o);
        if (probe->parsed()) return cmd_probe(o);
        return cmd_verify(o);
    } catch (const InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NotConverged& e) {
        std::cerr << "not converged: " << e.what() << " (t=" << e.t << ")\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
