#include "dioph/run.hpp"
#include "dioph/cache.hpp"
#include "dioph/errors.hpp"
#include "dioph/projections.hpp"
#include "dioph/restriction.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#ifndef DIOPH_VERSION
#define DIOPH_VERSION "dev"
#endif

namespace dioph {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* version() { return DIOPH_VERSION; }

namespace {

std::string g17(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Everything one command produces, flushed at the end in a fixed order.
struct Output {
    const RunConfig& cfg;
    RunResult res;
    json values = json::object();

    void file(const std::string& name, const std::string& body)
    {
        fs::create_directories(cfg.out_dir);
        std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out) throw Error(ErrorKind::ConstraintViolation, "cli", "output dir not writable: " + cfg.out_dir);
        res.files.push_back(name);
    }

    void check(const std::string& name, const std::string& topic, bool pass, const std::string& detail)
    {
        res.assertions.push_back({name, topic, pass, detail});
    }
};

int last_stage_count(const RunConfig& c, int need)
{
    if (c.params.stages < need)
        throw Error(ErrorKind::ConstraintViolation, "cli", "command needs stages>=" + std::to_string(need));
    return c.params.stages;
}

std::uint64_t smallest_tag(const IntervalSet& s)
{
    std::uint64_t best = 0;
    for (auto t : s.tags)
        if (t && (!best || t < best)) best = t;
    return best;
}

void cmd_construct(Output& o)
{
    const RunConfig& c = o.cfg;
    const ParamSet ps = validate_params(c.params);
    const StageSequence qs = sequence_for(c);

    std::string seq = "stage,q,log2_q,compliant\n";
    for (std::size_t i = 0; i < qs.size(); ++i)
        seq += std::to_string(i + 1) + "," + to_string(qs.q[i]) + "," + g17(log2_big(qs.q[i])) + "," +
               (qs.compliant[i] ? "1" : "0") + "\n";
    o.file("sequence.csv", seq);

    const auto sets = build_stages(c, qs);
    const Rational sep_e = -(Rational(2) * ps.gamma + ps.beta());
    std::string counts = "stage,centers,components\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const int st = static_cast<int>(i + 1);
        std::ostringstream os;
        write_csv(os, sets[i]);
        o.file("stage_" + std::to_string(st) + ".csv", os.str());
        counts += std::to_string(st) + "," + std::to_string(sets[i].size()) + "," +
                  (ps.d == 1 ? std::to_string(sets[i].components().size()) : std::string("")) + "\n";

        if (ps.d != 1 || c.stage_mode != StageMode::primes_excluding) continue;
        // Gap of the whole stage when the fast path applies, else of the surviving centers.
        Rational gap;
        std::string scope = "stage";
        try {
            const PrimeWindow w = window_for(c, qs, st);
            gap = min_gap_fast(ImplicitStage::build(st, ps, qs, c.stage_mode, &w));
        } catch (const Error&) {
            if (sets[i].size() < 2) continue;
            gap = min_gap(sets[i]);
            scope = "survivors";
        }
        const bool ok = cmp_power(gap, qs.at(st), sep_e) >= 0;
        o.check("min_gap_stage_" + std::to_string(st), "separation", ok,
                scope + " min gap 2^" + g17(log2_q(gap)) + " vs q^" + to_string(sep_e));
    }
    o.file("stage_counts.csv", counts);
    o.values["stages"] = sets.size();
    o.values["deepest_centers"] = sets.back().size();
}

void cmd_measure(Output& o)
{
    const RunConfig& c = o.cfg;
    const ParamSet ps = validate_params(c.params);
    const StageSequence qs = sequence_for(c);
    const auto sets = build_stages(c, qs);
    const MeasureTree tree = build_measure_tree(sets);
    {
        std::ostringstream os;
        write_tree_csv(os, tree);
        o.file("tree.csv", os.str());
    }

    const double target = std::min(ps.dimension().get_d(), static_cast<double>(ps.d));
    std::vector<std::pair<std::vector<Rational>, Rational>> samples;
    const auto& deep = tree.deepest();
    const std::size_t n = std::min(c.samples, deep.size());
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t k = n == 1 ? 0 : s * (deep.size() - 1) / (n - 1);
        std::vector<Rational> x(deep.coords.begin() + static_cast<std::ptrdiff_t>(k * ps.d),
                                deep.coords.begin() + static_cast<std::ptrdiff_t>((k + 1) * ps.d));
        // Stage-1 balls hold a fixed share of the mass, so only finer scales say anything.
        for (std::size_t i = qs.size() > 1 ? 1 : 0; i < qs.size(); ++i)
            samples.emplace_back(x, Rational(1) / Rational(qs.q[i]));
    }
    const FrostmanStats fs = frostman_fit(TreeModel(tree), samples, target, c.tolerance);
    std::string csv = "x,log2_r,log2_mass,slope\n";
    for (const auto& s : fs.samples)
        csv += to_string(s.x[0]) + "," + g17(log2_q(s.r)) + "," + g17(s.log2_mass) + "," + g17(s.slope) + "\n";
    o.file("frostman.csv", csv);
    o.values["frostman_min_slope"] = fs.min_slope;
    o.values["frostman_max_slope"] = fs.max_slope;
    o.values["frostman_target"] = target;
    o.check("frostman_upper", "frostman", fs.pass,
            "min slope " + g17(fs.min_slope) + " vs " + g17(target) + " - " + g17(c.tolerance));

    const int m = static_cast<int>(sets.size());
    if (const std::uint64_t p = smallest_tag(sets.back()); p && ps.d == 1) {
        const LowerCheck lc = frostman_lower_check(tree, m, p, target, ps.gamma.get_d());
        o.values["lower_c_interval"] = lc.c_interval;
        o.values["lower_c_progression"] = lc.c_progression;
        o.check("frostman_lower", "frostman", lc.pass,
                "p=" + std::to_string(p) + " c_interval " + g17(lc.c_interval) + " floor " + g17(lc.c_floor));
    }
}

std::string spectrum_csv(const SparseSpectrum& G)
{
    std::string s = "k,re,im,log2_k,log2_abs\n";
    for (const auto& [k, v] : G.coeffs) {
        if (k < 0) continue;
        s += std::to_string(k) + "," + g17(v.real()) + "," + g17(v.imag()) + "," +
             (k ? g17(std::log2(static_cast<double>(k))) : std::string("")) + "," + g17(std::log2(std::abs(v))) + "\n";
    }
    return s;
}

std::string shells_csv(const std::vector<ShellRow>& rows)
{
    std::string s = "j,log2_max,log2_upper,empty\n";
    for (const auto& r : rows)
        s += std::to_string(r.j) + "," + g17(r.log2_max) + "," + g17(r.log2_upper) + "," + (r.empty ? "1" : "0") + "\n";
    return s;
}

void cmd_spectrum(Output& o)
{
    const RunConfig& c = o.cfg;
    validate_params(c.params, Regime::spectrum);
    const StageSequence qs = sequence_for(c);

    RunConfig keyed = c;
    keyed.out_dir.clear();
    keyed.cache_dir.clear();
    keyed.command = Command::spectrum;
    const std::string key = SpectrumCache::key("spectrum\n" + config_text(keyed));
    const std::string dir = resolve_cache_dir(c.cache_dir);

    std::optional<SparseSpectrum> G;
    bool hit = false;
    if (!dir.empty()) {
        G = SpectrumCache(dir).lookup(key, &o.res.warnings);
        hit = G.has_value();
    }
    if (!G) {
        SparseSpectrum acc = unit_spectrum();
        for (int i = 1; i <= static_cast<int>(qs.size()); ++i)
            acc = product_spectrum(acc, F_coeffs(spectral_stage(c, qs, i), c.k_max), c.k_max, c.err_budget);
        G = std::move(acc);
        if (!dir.empty()) SpectrumCache(dir).store(key, *G);
    }
    o.values["cache"] = dir.empty() ? "off" : (hit ? "hit" : "miss");
    o.values["cache_key"] = key;
    o.file("spectrum.csv", spectrum_csv(*G));
    const auto shells = shell_maxima(*G);
    o.file("shells.csv", shells_csv(shells));

    const double g0 = G->at(0).real();
    o.values["g0"] = g0;
    o.values["err_budget"] = G->err_budget;
    o.values["tail_l1"] = G->tail_l1;
    o.check("mass_window", "mass-window", g0 >= 0.5 && g0 <= 1.5, "G(0) = " + g17(g0));
    o.check("hermitian", "spectrum-symmetry", G->hermitian(1e-12), "conj(G(k)) = G(-k)");
    try {
        const FourierFit fit = fit_fourier_dimension(shells);
        o.values["shell_slope"] = fit.slope;
        o.values["fourier_estimate"] = fit.estimate;
    } catch (const Error& e) {
        o.res.warnings.push_back(e.what());
    }
}

void cmd_dims(Output& o)
{
    const RunConfig& c = o.cfg;
    const ParamSet ps = validate_params(c.params);
    last_stage_count(c, 2);
    const StageSequence qs = sequence_for(c);

    if (c.nongeometric) {
        const PrimeWindow w1 = window_for(c, qs, 1), w2 = window_for(c, qs, 2);
        const IntervalSet s1 = build_stage(1, ps, qs, c.stage_mode, &w1);
        const ImplicitStage st2 = ImplicitStage::build(2, ps, qs, c.stage_mode, &w2);
        const ImplicitTree tree = ImplicitTree::weighted(s1, st2);
        const DimsReport rep = measure_dims_report(tree, c.samples, c.b, ps.beta());
        std::string csv = "x,scale_slope,weight\n";
        for (const auto& s : rep.summary.samples)
            csv += to_string(s.x[0]) + "," + g17(s.scale_slope) + "," + g17(s.weight) + "\n";
        o.file("local_dims.csv", csv);
        const double target = Rational(c.b + ps.beta()).get_d();
        o.values["inf_slope"] = rep.inf_slope;
        o.values["typical_slope"] = rep.typical_slope;
        o.values["inf_prime"] = rep.inf_prime;
        o.values["window_2_primes"] = w2.count();
        o.check("typical_slope", "local-dimension", std::fabs(rep.typical_slope - target) <= c.tolerance,
                "typical " + g17(rep.typical_slope) + " vs b+beta " + g17(target));
        o.check("inf_below_typical", "local-dimension", rep.inf_slope < rep.typical_slope,
                "inf " + g17(rep.inf_slope) + " < typical " + g17(rep.typical_slope));
        o.res.warnings.push_back("Fourier side is not certified for nongeometric windows");
        return;
    }

    const TwoStageDims d = two_stage_dims(c, qs);
    o.file("shells.csv", shells_csv(d.shells.shells));
    o.values["cover"] = to_string(d.cover);
    o.values["box_estimate"] = d.box.estimate;
    o.values["hausdorff_target"] = d.hausdorff_target;
    o.values["shell_slope"] = d.fit.slope;
    o.values["fourier_estimate"] = d.fit.estimate;
    o.values["fourier_target"] = d.fourier_target;
    o.values["shell_method"] = d.shells.method;
    o.values["g0"] = d.shells.g0;
    o.check("box_dimension", "box-dimension", std::fabs(d.box.estimate - d.hausdorff_target) <= c.tolerance,
            "estimate " + g17(d.box.estimate) + " vs " + g17(d.hausdorff_target));
    o.check("shell_slope", "fourier-decay", std::fabs(d.fit.slope + d.fourier_target / 2) <= c.tolerance,
            "slope " + g17(d.fit.slope) + " vs " + g17(-d.fourier_target / 2));
    o.check("mass_window", "mass-window", d.shells.g0 >= 0.5 && d.shells.g0 <= 1.5, "G(0) = " + g17(d.shells.g0));
}

void cmd_project(Output& o)
{
    const RunConfig& c = o.cfg;
    if (c.s.size() != 3) throw Error(ErrorKind::ConstraintViolation, "cli", "project needs s = sA,sB,sC");
    const ABCParams abc = make_abc(c.s[0], c.s[1], c.s[2]);
    const BigInt q = c.q1 ? *c.q1 : (c.q_list.empty() ? ipow(BigInt(2), 20) : c.q_list.front());

    BigInt nA, nB, H, qbC;
    if (!exact_power(q, abc.sA, nA) || !exact_power(q, abc.sB, nB) || !exact_power(q, abc.betaC(), qbC))
        throw Error(ErrorKind::ConstraintViolation, "projections", "q^sA, q^sB and q^betaC must be integers");
    H = floor_power(q, abc.gammaC());
    if (H * qbC > 4096) throw Error(ErrorKind::BudgetExceeded, "projections", "C grid above 4096 denominators");

    const auto A = lattice_points(nA), B = lattice_points(nB);
    std::set<Rational> grid;
    for (BigInt h = 1; h <= H; ++h)
        for (const auto& x : lattice_points(h * qbC)) grid.insert(x);

    const Rational e = (abc.sA + abc.sB + abc.sC) / 2;
    std::string csv = "c,count,bound_log2,ratio,pass,contained\n";
    bool all_cover = true, all_lattice = true;
    double worst = 0;
    for (const auto& cc : grid) {
        const BigInt n = sumset_cover(A, cc, B, q);
        const bool ok = cmp_power(Rational(n) / 3, q, e) <= 0;
        const bool in = lattice_containment(A, cc, B, nA);
        const double ratio = std::exp2(log2_big(n) - e.get_d() * log2_big(q));
        worst = std::max(worst, ratio);
        all_cover = all_cover && ok;
        all_lattice = all_lattice && in;
        csv += to_string(cc) + "," + to_string(n) + "," + g17(e.get_d() * log2_big(q)) + "," + g17(ratio) + "," +
               (ok ? "1" : "0") + "," + (in ? "1" : "0") + "\n";
    }
    o.file("sumset.csv", csv);
    o.values["directions"] = grid.size();
    o.values["worst_slack"] = worst;
    o.check("sumset_cover", "projection-cover", all_cover, "max count / q^e = " + g17(worst) + " (allowed 3)");
    o.check("lattice_containment", "projection-cover", all_lattice, "sums on the scaled lattice for every c");

    // Regime table for s sorted descending.
    std::vector<Rational> s = c.s;
    std::sort(s.rbegin(), s.rend());
    std::vector<Rational> ts = c.t;
    if (ts.empty())
        for (int k = 0; k <= 20; ++k) {
            ts.push_back(Rational(k, 10));
            ts.back().canonicalize();
        }
    std::sort(ts.begin(), ts.end());
    const RegimeReport rep = regime_comparator(s[0], s[1], s[2], ts);
    std::string rc = "t,average,f,sum,value,active\n";
    bool mono = true;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        if (k && r.value < rep.rows[k - 1].value) mono = false;
        rc += to_string(r.t) + "," + to_string(r.average) + "," + to_string(r.f) + "," + to_string(r.sum) + "," +
              to_string(r.value) + "," + r.active + "\n";
    }
    o.file("regime.csv", rc);
    json cr = json::array();
    for (const auto& x : rep.crossings) cr.push_back(to_string(x));
    o.values["crossings"] = cr;
    o.values["wide"] = rep.wide;
    o.check("regime_monotone", "projection-regimes", mono, "comparator nondecreasing in t");

    const Rational brk = 1 + s[0] - s[1];
    o.check("f_continuous", "projection-regimes", piecewise_f(s[0], s[1], s[2], brk) == s[0] + s[2],
            "both branches meet at t = " + to_string(brk));

    // Special cases with t2 = 1 on the t grid.
    bool special = true;
    std::string first_bad;
    for (const auto& t1 : ts) {
        if (t1 <= 0 || t1 >= 1) continue;
        const Rational v = product_direction_bound(s[0], s[1], s[2], t1, Rational(1));
        Rational want = t1 <= s[0] - s[1] ? Rational(s[0] + s[2]) : Rational((s[0] + s[1] + t1) / 2 + s[2]);
        if (want > 1) want = 1;
        if (v != want && special) {
            special = false;
            first_bad = "t1 = " + to_string(t1) + ": " + to_string(v) + " vs " + to_string(want);
        }
    }
    o.check("product_direction_special", "projection-regimes", special,
            special ? "t2 = 1 cases match the closed forms" : first_bad);
}

void cmd_restrict(Output& o)
{
    const RunConfig& c = o.cfg;
    const ParamSet ps = validate_params(c.params);
    if (ps.d != 1) throw Error(ErrorKind::ConstraintViolation, "restriction", "d=1");
    const StageSequence qs = sequence_for(c);
    const RestrictionParams rp = restriction_params(ps.gamma, ps.beta(), c.p_tilde, c.q_exp);
    const auto sets = build_stages(c, qs);
    const MeasureTree tree = build_weighted_tree(sets);

    std::string csv = "stage,prime,mass,lower_bound,computed,min_ext_ratio,dual_points,dist_checked,dist_failures\n";
    std::vector<RatioRow> rows;
    for (int i = 1; i <= static_cast<int>(sets.size()); ++i) {
        std::set<std::uint64_t> tags(sets[static_cast<std::size_t>(i - 1)].tags.begin(),
                                     sets[static_cast<std::size_t>(i - 1)].tags.end());
        tags.erase(0);
        if (tags.empty()) continue;
        std::uint64_t best = 0;
        Rational best_mass = -1;
        for (auto p : tags)
            if (Rational m = progression_mass(tree, i, p); m > best_mass) {
                best_mass = m;
                best = p;
            }
        const RatioRow r = restriction_ratio(tree, i, best, rp, qs.power(i, ps.beta()));
        rows.push_back(r);
        csv += std::to_string(i) + "," + std::to_string(best) + "," + g17(r.mass) + "," + g17(r.lower_bound) + "," +
               g17(r.computed) + "," + g17(r.min_ext_ratio) + "," + std::to_string(r.dual_points) + "," +
               std::to_string(r.dist.checked) + "," + std::to_string(r.dist.failures) + "\n";
        o.check("knapp_stage_" + std::to_string(i), "knapp", r.min_ext_ratio >= 0.22,
                "min |ext|/mu = " + g17(r.min_ext_ratio));
        o.check("dist_stage_" + std::to_string(i), "knapp", r.dist.failures == 0,
                std::to_string(r.dist.checked) + " exact checks, worst " + to_string(r.dist.worst));
    }
    o.file("ratio.csv", csv);
    o.values["exponent"] = rp.exponent();
    o.values["threshold"] = rp.threshold();
    if (rows.size() >= 2) {
        const auto& a = rows.front();
        const auto& b = rows.back();
        const double lq = log2_big(qs.at(b.stage)) - log2_big(qs.at(a.stage));
        const double grow = std::log2(b.lower_bound / a.lower_bound);
        const double need = 0.9 * rp.exponent() * lq;
        o.values["log2_growth"] = grow;
        o.check("ratio_growth", "restriction-ratio", grow >= need,
                "log2 growth " + g17(grow) + " vs " + g17(need));
    }
}

void cmd_report(Output& o)
{
    const RunConfig& c = o.cfg;
    std::vector<fs::path> files;
    if (fs::exists(c.out_dir))
        for (const auto& e : fs::directory_iterator(c.out_dir)) {
            const std::string name = e.path().filename().string();
            if (name.size() > 13 && name.ends_with("_summary.json") && name != "report_summary.json")
                files.push_back(e.path());
        }
    std::sort(files.begin(), files.end());
    std::string csv = "command,assertion,topic,pass\n";
    std::size_t total = 0, failed = 0;
    for (const auto& f : files) {
        std::ifstream in(f);
        json j;
        try {
            in >> j;
        } catch (const json::exception&) {
            o.res.warnings.push_back("unreadable summary " + f.filename().string());
            continue;
        }
        for (const auto& a : j.value("assertions", json::array())) {
            ++total;
            const bool pass = a.value("pass", false);
            failed += !pass;
            csv += j.value("command", "?") + "," + a.value("name", "?") + "," + a.value("topic", "?") + "," +
                   (pass ? "1" : "0") + "\n";
        }
    }
    o.file("report.csv", csv);
    o.values["summaries"] = files.size();
    o.values["assertions"] = total;
    o.check("all_summaries_pass", "report", total > 0 && failed == 0,
            std::to_string(total - failed) + "/" + std::to_string(total) + " assertions pass");
}

}  // namespace

StageSequence sequence_for(const RunConfig& c)
{
    if (!c.q_list.empty()) {
        if (static_cast<int>(c.q_list.size()) != c.params.stages)
            throw Error(ErrorKind::ConstraintViolation, "params", "len(q)=stages");
        return sequence_from_list(c.params, c.q_list);
    }
    return make_sequence(c.params, c.q1);
}

PrimeWindow window_for(const RunConfig& c, const StageSequence& qs, int i)
{
    if (c.nongeometric) return nongeometric_window(c.a, c.b, c.params.beta(), i, qs);
    if (c.params.gamma == 0) return {};
    return standard_window(qs.at(i), c.params.gamma);
}

std::vector<IntervalSet> build_stages(const RunConfig& c, const StageSequence& qs)
{
    std::vector<IntervalSet> sets;
    for (int i = 1; i <= static_cast<int>(qs.size()); ++i) {
        PrimeWindow w;
        const PrimeWindow* wp = nullptr;
        if (c.nongeometric) {
            w = window_for(c, qs, i);
            wp = &w;
        }
        if (sets.empty()) {
            sets.push_back(build_stage(i, c.params, qs, c.stage_mode, wp));
            continue;
        }
        const auto clip = sets.back().components();
        IntervalSet next = build_stage(i, c.params, qs, c.stage_mode, wp, c.params.d == 1 ? &clip : nullptr);
        sets.push_back(intersect_stages(sets.back(), next));
    }
    return sets;
}

SpectralStage spectral_stage(const RunConfig& c, const StageSequence& qs, int i)
{
    std::vector<std::uint64_t> primes;
    if (c.nongeometric || c.params.gamma > 0) primes = window_for(c, qs, i).primes;
    return SpectralStage::make(i, qs.at(i), qs.power(i, c.params.beta()), std::move(primes));
}

TwoStageDims two_stage_dims(const RunConfig& c, const StageSequence& qs)
{
    const ParamSet& ps = c.params;
    if (ps.d != 1 || qs.size() < 2) throw Error(ErrorKind::ConstraintViolation, "cli", "2-stage d=1 run");
    TwoStageDims d;
    d.hausdorff_target = std::min(Rational(2 * ps.gamma + ps.beta()).get_d(), 1.0);
    d.fourier_target = Rational(2 * ps.gamma).get_d();

    PrimeWindow w1, w2;
    const PrimeWindow *p1 = nullptr, *p2 = nullptr;
    if (c.nongeometric) {
        w1 = window_for(c, qs, 1);
        w2 = window_for(c, qs, 2);
        p1 = &w1;
        p2 = &w2;
    }
    const IntervalSet s1 = build_stage(1, ps, qs, c.stage_mode, p1);
    const ImplicitStage st2 = ImplicitStage::build(2, ps, qs, c.stage_mode, p2);
    d.cover = cover_count_within(st2, s1.components());
    d.box = box_dimension_estimate(d.cover, qs.at(2));

    const SpectralStage f1 = spectral_stage(c, qs, 1), f2 = spectral_stage(c, qs, 2);
    const BigInt half = f2.qbeta / 2;
    const int j_max = std::min(124, static_cast<int>(std::floor(log2_big(qs.at(2)))));
    if (half > 1) {
        const std::int64_t k1 = fits_i64(half - 1) ? std::min<std::int64_t>(c.k_max, to_i64(half - 1)) : c.k_max;
        d.G1 = product_spectrum(unit_spectrum(), F_coeffs(f1, k1), k1, c.err_budget);
        d.shells = separated_shells(d.G1, f2, j_max);
    } else {
        d.G1 = product_spectrum(unit_spectrum(), F_coeffs(f1, c.k_max), c.k_max, c.err_budget);
        d.shells = certified_shells(d.G1, f2, j_max);
    }
    d.fit = fit_fourier_dimension_hull(d.shells.shells, 0, j_max);
    return d;
}

RunResult run(const RunConfig& c)
{
    Output o{c, {}};
    o.file("manifest.txt", std::string("dioph ") + version() + "\n" + config_text(c));
    try {
        switch (c.command) {
        case Command::construct: cmd_construct(o); break;
        case Command::measure: cmd_measure(o); break;
        case Command::spectrum: cmd_spectrum(o); break;
        case Command::dims: cmd_dims(o); break;
        case Command::project: cmd_project(o); break;
        case Command::restrict: cmd_restrict(o); break;
        case Command::report: cmd_report(o); break;
        }
    } catch (const Error& e) {
        o.res.message = e.module() + ": " + kind_name(e.kind()) + ": " + e.detail();
    }

    bool ok = o.res.message.empty();
    for (const auto& a : o.res.assertions) ok = ok && a.pass;
    o.res.status = ok ? 0 : 1;

    json j;
    j["command"] = command_name(c.command);
    j["version"] = version();
    j["status"] = o.res.status;
    if (!o.res.message.empty()) j["error"] = o.res.message;
    json as = json::array();
    for (const auto& a : o.res.assertions)
        as.push_back({{"name", a.name}, {"topic", a.topic}, {"pass", a.pass}, {"detail", a.detail}});
    j["assertions"] = as;
    j["values"] = o.values;
    j["warnings"] = o.res.warnings;
    j["files"] = o.res.files;
    o.file(std::string(command_name(c.command)) + "_summary.json", j.dump(2) + "\n");
    return o.res;
}

}  // namespace dioph
