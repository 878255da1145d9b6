// Acceptance gate: one line per criterion, nonzero exit when any fails.
// argv[1] is the path to the command-line binary (used by criterion 9).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "expmapkit/expmapkit.hpp"

using namespace expmapkit;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream note;
    for (double ar : {0.0, 1.0, -0.9}) {
        auto t1 = std::chrono::steady_clock::now();
        auto c = classify_parameter(Parameter(ar, 0.0));
        if (seconds_since(t1) >= 1.0) {
            ok = false;
            note << " a=" << ar << " slower than 1 s;";
        }
        bool esc = std::holds_alternative<SingularEscapes>(c);
        bool conn =
            predict_connectivity(c).verdict == Connectivity::Connected;
        if (!esc || !conn) {
            ok = false;
            note << " a=" << ar << " not SingularEscapes/Connected;";
        }
    }
    for (double ar : {-2.0, -3.0}) {
        auto t1 = std::chrono::steady_clock::now();
        auto c = classify_parameter(Parameter(ar, 0.0));
        if (seconds_since(t1) >= 1.0) {
            ok = false;
            note << " a=" << ar << " slower than 1 s;";
        }
        const auto* cyc = std::get_if<AttractingCycle>(&c);
        bool good = cyc && cyc->period == 1 &&
                    predict_connectivity(c).verdict ==
                        Connectivity::Disconnected;
        if (ar == -2.0 && cyc && cyc->multiplier_modulus >= 0.2) good = false;
        if (!good) {
            ok = false;
            note << " a=" << ar << " not AttractingCycle(1)/Disconnected;";
        }
    }
    double dt = seconds_since(t0);
    if (dt >= 5.0) {
        ok = false;
        note << " too slow";
    }
    std::ostringstream d;
    d << "classification table, " << dt << " s total" << note.str();
    report(1, ok, d.str());
}

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream note;
    try {
        Parameter a0(0.0, 0.0);
        ExternalAddress c0 = ExternalAddress::constant(0);
        RayPolyline line = trace_polyline(a0, c0, 0.5, 10.0, 50);
        double prev = -1e9;
        for (const auto& s : line.samples) {
            if (!(std::abs(s.z.imag()) < 1e-8)) ok = false;
            if (!(s.z.real() > prev)) ok = false;
            prev = s.z.real();
        }
        RayPoint at12 = trace_ray(a0, c0, 2.0, 12);
        if (!(at12.residual < 1e-9)) ok = false;
        note << "50 real samples, residual(depth 12)=" << at12.residual;
    } catch (const Error& e) {
        ok = false;
        note << "threw: " << e.what();
    }
    double dt = seconds_since(t0);
    if (dt >= 1.0) ok = false;
    std::ostringstream d;
    d << "real-ray tracer, " << dt << " s; " << note.str();
    report(2, ok, d.str());
}

void criterion_3() {
    bool ok = true;
    std::ostringstream note;
    note << "contraction of the tower-form residual estimate";
    try {
        for (double ar : {0.0, 1.0}) {
            Parameter a(ar, 0.0);
            for (const char* spec : {"const:0", "const:1", "per:0,1"}) {
                ExternalAddress s = ExternalAddress::parse(spec);
                for (double t : {1.0, 2.0, 5.0}) {
                    for (int n = 4; n <= 10; ++n) {
                        auto hi = trace_ray(a, s, t, n + 1).residual_estimate;
                        auto lo = trace_ray(a, s, t, n).residual_estimate;
                        if (!estimate_less(hi, lo, 0.5)) {
                            ok = false;
                            note << "; fails at a=" << ar << " " << spec
                                 << " t=" << t << " n=" << n;
                        }
                    }
                }
            }
        }
    } catch (const Error& e) {
        ok = false;
        note << "; threw: " << e.what();
    }
    report(3, ok, note.str());
}

void criterion_4() {
    auto r = verify_elementary(20260824, 100000);
    std::ostringstream d;
    d << "elementary chain: " << r.samples << " samples, " << r.violations
      << " violations, worst slack " << r.worst_slack;
    report(4, r.pass, d.str());
}

void criterion_5() {
    auto r = verify_exp_bound();
    std::ostringstream d;
    d << "exp-bounded itineraries: " << r.samples << " ray points, "
      << r.violations << " violations";
    report(5, r.pass && r.samples >= 100, d.str());
}

void criterion_6() {
    auto r = verify_sandwich(4);
    std::ostringstream d;
    d << "sandwich anchors x0 in {1,2,3}, n=4: " << r.samples << " steps, "
      << r.violations << " violations";
    report(6, r.pass, d.str());
}

void criterion_7() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream note;
    Box box{-4.0, 4.0, -4.0, 4.0};
    EscapeGrid g =
        escape_grid(Parameter(-2.0, 0.0), box, 256, 256, 200, 50.0);
    auto w = disconnection_witness(g);
    if (!w) {
        ok = false;
        note << "no witness for a=-2";
    } else if (!witness_sound(g, *w)) {
        ok = false;
        note << "witness recheck failed";
    } else {
        note << "a=-2 witness sound, blocker " << w->blocker_cells.size()
             << " cells";
    }
    // Informational only: a finite grid cannot certify connectivity.
    EscapeGrid g0 = escape_grid(Parameter(0.0, 0.0), box, 256, 256, 200, 50.0);
    auto w0 = disconnection_witness(g0);
    note << "; a=0 grid witness " << (w0 ? "present" : "absent")
         << " (informational, non-asserting)";
    double dt = seconds_since(t0);
    if (dt >= 30.0) {
        ok = false;
        note << "; too slow";
    }
    std::ostringstream d;
    d << "grid probe, " << dt << " s; " << note.str();
    report(7, ok, d.str());
}

void criterion_8() {
    auto r = verify_tower(20260824, 10000);
    std::ostringstream d;
    d << "tower agreement and transitivity: " << r.samples << " checks, "
      << r.violations << " violations";
    report(8, r.pass, d.str());
}

void criterion_9(const char* cli) {
    bool ok = true;
    std::ostringstream note;
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(cli) + " " + args;
        return std::system(cmd.c_str());
    };
    int rc = 0;
    rc |= run("render --a-re -2 --width 64 --height 64 --budget-n 100"
              " --out acc_render_1 > /dev/null");
    rc |= run("render --a-re -2 --width 64 --height 64 --budget-n 100"
              " --out acc_render_2 > /dev/null");
    rc |= run("verify --seed 7 --elementary-n 2000 --tower-n 2000"
              " --equivariance-n 200 --out acc_verify_1 > /dev/null");
    rc |= run("verify --seed 7 --elementary-n 2000 --tower-n 2000"
              " --equivariance-n 200 --out acc_verify_2 > /dev/null");
    if (rc != 0) {
        ok = false;
        note << "nonzero exit from the tool; ";
    }
    for (const char* pair : {"acc_render_1.ppm:acc_render_2.ppm",
                             "acc_render_1.json:acc_render_2.json",
                             "acc_verify_1.json:acc_verify_2.json"}) {
        std::string both(pair);
        auto colon = both.find(':');
        std::string lhs = slurp(both.substr(0, colon));
        std::string rhs = slurp(both.substr(colon + 1));
        if (lhs.empty() || lhs != rhs) {
            ok = false;
            note << both << " differs; ";
        }
    }
    note << "render and verify outputs byte-compared across two runs";
    report(9, ok, note.str());
}

}  // namespace

int main(int argc, char** argv) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (argc > 1) {
        criterion_9(argv[1]);
    } else {
        report(9, false, "cli binary path not provided");
    }
    return failures == 0 ? 0 : 1;
}
