// Batch verification front end: reads a JSON job document, runs one command
// (Verify, Solve, Bracket, Trajectory, Discriminant, Catalog), and writes a
// result document (plus a CSV for trajectories) atomically into the output
// directory.  Exit codes: 0 success, 2 schema violation, 3 mathematical
// failure, 4 tolerance breach in a verification job.
#include "polsep/determining.hpp"
#include "polsep/dynamics.hpp"
#include "polsep/roots.hpp"
#include "polsep/serialize.hpp"
#include "polsep/standard.hpp"
#include "polsep/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace polsep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitMath = 3;
constexpr int kExitTolerance = 4;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string());
        os << content;
    }
    fs::rename(tmp, path);
}

Rational scalar_from_json(const Json& j) {
    if (j.is_string()) return Rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw SchemaError("scalar values must be strings like \"3/4\" or integers");
}

Rational field_or(const Json& j, const char* name, Rational def = Rational(0)) {
    if (!j.contains(name)) return def;
    return scalar_from_json(j.at(name));
}

// ---------------------------------------------------------------------------
// Built-in catalog

struct CatalogEntry {
    std::string name;
    long m = 1, n = 1;  // TTW index k = m/n; PW uses the half-angle convention
    PotentialSpec spec;
    std::optional<YConstants> verify_constants;
    StandardCase verify_case = StandardCase::I;
    std::string note;
};

std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> out;
    {
        CatalogEntry e;
        e.name = "ttw-1/2";
        e.m = 1;
        e.n = 2;
        e.spec = make_ttw<Rational>(1, 2, Rational(1), Rational(2), Rational(3));
        e.note = "fourth-order integral exists (Case II, C2=0 branch); constants not catalogued";
        out.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "ttw-1";
        e.m = 1;
        e.n = 1;
        // alpha = 1, beta = -2 realizes the D2=0 Case I branch family with
        // (s1, s4) = (1, 2) rotated into the unrotated TTW frame
        e.spec = make_ttw<Rational>(1, 1, Rational(1), Rational(1), Rational(-2));
        YConstants c;
        c.B1 = 1;
        c.D1 = -1;
        e.verify_constants = c;
        e.verify_case = StandardCase::I;
        out.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "ttw-3/2";
        e.m = 3;
        e.n = 2;
        e.spec = make_ttw<Rational>(3, 2, Rational(1), Rational(2), Rational(3));
        e.note = "lowest extra integral has order 8; outside the fourth-order engine";
        out.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "ttw-2";
        e.m = 2;
        e.n = 1;
        e.spec = make_ttw<Rational>(2, 1, Rational(1), Rational(2), Rational(3));
        YConstants c;
        c.D1 = 1;
        e.verify_constants = c;
        e.verify_case = StandardCase::I;
        out.push_back(std::move(e));
    }
    {
        CatalogEntry e;
        e.name = "pw-3/2";
        e.m = 3;
        e.n = 2;
        e.spec = make_pw<Rational>(3, Rational(1), Rational(2), Rational(3));
        YConstants c;
        c.C1 = 1;
        e.verify_constants = c;
        e.verify_case = StandardCase::II;
        e.note = "the catalogued fourth-order candidate leaves a known irreducible residual";
        out.push_back(std::move(e));
    }
    return out;
}

const CatalogEntry& catalog_lookup(const std::string& name) {
    static const std::vector<CatalogEntry> entries = catalog();
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw SchemaError("unknown catalog entry: " + name);
}

// ---------------------------------------------------------------------------
// Job context

struct JobContext {
    Mode mech = Mode::Classical;
    bool sampled = false;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    fs::path outdir;
    Json result;
    std::optional<std::string> failed_residual;
};

PotentialSpec spec_from_job(const Json& j) {
    if (j.contains("potential")) return catalog_lookup(j.at("potential").get<std::string>()).spec;
    if (j.contains("spec")) return potentialspec_from_json<Rational>(j.at("spec"));
    throw SchemaError("job needs a \"spec\" document or a catalog \"potential\" name");
}

StandardCase case_from_job(const Json& j, const YConstants& c) {
    if (j.contains("case")) {
        const auto s = j.at("case").get<std::string>();
        if (s == "I") return StandardCase::I;
        if (s == "II") return StandardCase::II;
        throw SchemaError("case must be \"I\" or \"II\"");
    }
    if (c.A3 != 0 || c.A4 != 0 || c.C1 != 0 || c.C2 != 0) return StandardCase::II;
    return StandardCase::I;
}

GFunctions<Rational> reconstruct_G(const YConstants& c, const PotentialSpec& spec,
                                   StandardCase which, Mode mech) {
    auto G = build_G123(c, spec, GammaFunctions{});
    G.G4 = build_G4(c, spec, which);
    complete_G4(c, spec, G, mech);
    return G;
}

// Record one residual entry; flags the first tolerance/exactness failure.
void record_residual(JobContext& ctx, Json& list, const std::string& name,
                     const RatExpr& residual, double hbar) {
    ResidualReportEntry e;
    if (ctx.sampled) {
        e = sample_residual(name, residual, hbar, 40, ctx.seed);
        if (e.max_abs_sample > ctx.tolerance && !ctx.failed_residual)
            ctx.failed_residual = name;
    } else {
        e.equation = name;
        e.exact_zero = residual.is_zero();
        if (!*e.exact_zero && !ctx.failed_residual) ctx.failed_residual = name;
    }
    list.push_back(to_json(e));
}

// One entry summarizing every coefficient of a bracket result.
template <typename OpLike>
void record_bracket_residual(JobContext& ctx, Json& list, const std::string& name,
                             const OpLike& op, double hbar) {
    ResidualReportEntry e;
    e.equation = name;
    if (ctx.sampled) {
        for (const auto& [k, v] : op.terms()) {
            const auto s = sample_residual(name, v, hbar, 40, ctx.seed);
            e.max_abs_sample = std::max(e.max_abs_sample, s.max_abs_sample);
            e.sample_points = s.sample_points;
        }
        if (e.max_abs_sample > ctx.tolerance && !ctx.failed_residual)
            ctx.failed_residual = name;
    } else {
        e.exact_zero = op.is_zero();
        if (!*e.exact_zero && !ctx.failed_residual) ctx.failed_residual = name;
    }
    list.push_back(to_json(e));
}

// ---------------------------------------------------------------------------
// Commands

void run_verify(JobContext& ctx, const Json& j) {
    const PotentialSpec spec = spec_from_job(j);
    YConstants c;
    if (j.contains("constants"))
        c = yconstants_from_json<Rational>(j.at("constants"));
    else if (j.contains("potential")) {
        const auto& entry = catalog_lookup(j.at("potential").get<std::string>());
        if (entry.verify_constants) c = *entry.verify_constants;
    }
    const double hbar = ctx.mech == Mode::Quantum ? 1.0 : 0.0;
    Json list = Json::array();

    // X is an integral of every separable potential; checked first.
    if (ctx.mech == Mode::Classical)
        record_bracket_residual(
            ctx, list, "bracket(H,X)",
            poisson_bracket(build_hamiltonian_classical(spec), build_X_classical(spec)), hbar);
    else
        record_bracket_residual(
            ctx, list, "bracket(H,X)",
            commutator(build_hamiltonian_quantum(spec), build_X_quantum(spec)), hbar);

    if (c.all_zero()) {
        ctx.result["note"] = "no fourth-order constants supplied; X-only verification";
    } else {
        const StandardCase which = case_from_job(j, c);
        record_residual(ctx, list, "compatibility", residual_compatibility(c, spec), hbar);
        record_residual(ctx, list, "LDES", residual_LDES(spec, c, which), hbar);
        record_residual(ctx, list, "C_theta", residual_Ctheta(spec, c, which, ctx.mech), hbar);
        const auto G = reconstruct_G(c, spec, which, ctx.mech);
        const auto res = residual_determining(c, spec, G);
        for (const auto& [name, r] : res.named()) {
            const RatExpr slice =
                ctx.mech == Mode::Classical ? RatExpr(r->num().hbar_slice(0)) : *r;
            record_residual(ctx, list, name, slice, hbar);
        }

        // the gold bracket: every coefficient of {H, Y} / [H, Y]
        if (ctx.mech == Mode::Classical)
            record_bracket_residual(
                ctx, list, "gold_bracket",
                poisson_bracket(build_hamiltonian_classical(spec), build_Y_classical(c, G)),
                hbar);
        else
            record_bracket_residual(
                ctx, list, "gold_bracket",
                commutator(build_hamiltonian_quantum(spec), build_Y_quantum(c, G)), hbar);
    }
    ctx.result["residuals"] = list;
}

void run_solve(JobContext& ctx, const Json& j) {
    const auto cs = j.at("case").get<std::string>();
    std::vector<SolutionFamily> fams;
    if (cs == "I")
        fams = solve_case_I<Rational>(field_or(j, "hbar", Rational(1)), field_or(j, "B2"),
                                      field_or(j, "D1"), field_or(j, "D2"));
    else if (cs == "II")
        fams = solve_case_II<Rational>(field_or(j, "hbar", Rational(1)), field_or(j, "A4"),
                                       field_or(j, "C1"), field_or(j, "C2"),
                                       field_or(j, "s2"));
    else
        throw SchemaError("case must be \"I\" or \"II\"");
    Json list = Json::array();
    for (const auto& f : fams) {
        Json fj = to_json(f);
        fj["classical_limit_null"] = has_null_classical_limit(f.S);
        list.push_back(std::move(fj));
    }
    ctx.result["families"] = list;
}

void run_bracket(JobContext& ctx, const Json& j) {
    const PotentialSpec spec = spec_from_job(j);
    const YConstants c = yconstants_from_json<Rational>(j.at("constants"));
    const StandardCase which = case_from_job(j, c);
    const auto G = reconstruct_G(c, spec, which, ctx.mech);
    if (ctx.mech == Mode::Classical) {
        const auto pb =
            poisson_bracket(build_hamiltonian_classical(spec), build_Y_classical(c, G));
        ctx.result["bracket"] = to_json(pb);
        ctx.result["zero"] = pb.is_zero();
    } else {
        const auto com = commutator(build_hamiltonian_quantum(spec), build_Y_quantum(c, G));
        ctx.result["bracket"] = to_json(com);
        ctx.result["zero"] = com.is_zero();
    }
}

void run_trajectory(JobContext& ctx, const Json& j) {
    const PotentialSpec spec = spec_from_job(j);
    const auto& st = j.at("state0");
    if (!st.is_array() || st.size() != 4)
        throw SchemaError("state0 must be [r, theta, p_r, p_theta]");
    PhaseState s0{st[0].get<double>(), st[1].get<double>(), st[2].get<double>(),
                  st[3].get<double>()};
    TrajectoryConfig cfg;
    cfg.tolerance = ctx.tolerance;
    if (j.contains("config")) {
        const auto& c = j.at("config");
        cfg.t_end = c.value("t_end", cfg.t_end);
        cfg.step = c.value("step", cfg.step);
        cfg.record_every = c.value("record_every", cfg.record_every);
        if (c.contains("integrator")) {
            const auto name = c.at("integrator").get<std::string>();
            if (name == "symplectic")
                cfg.integrator = IntegratorKind::SymplecticSplit;
            else if (name == "adaptive")
                cfg.integrator = IntegratorKind::AdaptiveRK;
            else
                throw SchemaError("integrator must be \"symplectic\" or \"adaptive\"");
        }
    }
    std::vector<std::pair<std::string, PhaseObservable>> obs{
        {"H", build_hamiltonian_classical(spec)}, {"X", build_X_classical(spec)}};
    if (j.contains("constants")) {
        const YConstants c = yconstants_from_json<Rational>(j.at("constants"));
        const StandardCase which = case_from_job(j, c);
        obs.emplace_back("Y", build_Y_classical(c, reconstruct_G(c, spec, which, Mode::Classical)));
    }
    const auto traj = integrate_trajectory(spec, s0, cfg);
    std::ostringstream csv;
    write_trajectory_csv<Rational>(csv, traj, obs);
    write_atomic(ctx.outdir / "trajectory.csv", csv.str());
    ctx.result["trajectory_csv"] = "trajectory.csv";
    const auto rep = conservation_report(traj, obs);
    ctx.result["conservation"] = to_json(rep);
    if (rep.worst() > ctx.tolerance * 100 && !ctx.failed_residual)
        ctx.failed_residual = "conservation drift";
}

void run_discriminant(JobContext& ctx, const Json& j) {
    const auto cs = j.at("case").get<std::string>();
    const Rational hbar = field_or(j, "hbar", Rational(1));
    Rational disc;
    std::vector<double> coeffs;
    int degree = 0;
    if (cs == "I") {
        const Rational B2 = field_or(j, "B2"), D1 = field_or(j, "D1"), D2 = field_or(j, "D2");
        disc = discriminant_case_I(hbar, B2, D1, D2);
        for (const auto& c : quartic_case_I(hbar, B2, D1, D2))
            coeffs.push_back(CoeffTraits<Rational>::to_double(c));
        degree = 4;
    } else if (cs == "II") {
        const Rational A4 = field_or(j, "A4"), C1 = field_or(j, "C1"), C2 = field_or(j, "C2");
        disc = discriminant_case_II(hbar, A4, C1, C2);
        for (const auto& c : cubic_case_II(hbar, A4, C1, C2))
            coeffs.push_back(CoeffTraits<Rational>::to_double(c));
        degree = 3;
    } else {
        throw SchemaError("case must be \"I\" or \"II\"");
    }
    const int nreal = static_cast<int>(real_roots(coeffs).size());
    ctx.result["discriminant"] = disc.str();
    ctx.result["classification"] =
        to_string(detail::classify(CoeffTraits<Rational>::to_double(disc), nreal, degree));
    ctx.result["real_roots"] = nreal;
}

void run_catalog(JobContext& ctx, const Json&) {
    Json list = Json::array();
    for (const auto& e : catalog()) {
        Json ej{{"name", e.name},
                {"m", e.m},
                {"n", e.n},
                {"integral_order", integral_order(static_cast<int>(e.m), static_cast<int>(e.n))},
                {"spec", to_json(e.spec)}};
        ej["verify"] = e.verify_constants
                           ? Json{{"constants", to_json(*e.verify_constants)},
                                  {"case", e.verify_case == StandardCase::I ? "I" : "II"}}
                           : Json(nullptr);
        if (!e.note.empty()) ej["note"] = e.note;
        list.push_back(std::move(ej));
    }
    ctx.result["entries"] = list;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superintegrable-potential verification jobs"};
    std::string input, output;
    std::string mode = "exact", mech = "classical";
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    app.add_option("--input", input, "job JSON document")->required();
    app.add_option("--output", output, "output directory")->required();
    app.add_option("--mode", mode, "exact | sampled")
        ->check(CLI::IsMember({"exact", "sampled"}));
    app.add_option("--mech", mech, "classical | quantum")
        ->check(CLI::IsMember({"classical", "quantum"}));
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--tolerance", tolerance, "sampled-mode tolerance");
    CLI11_PARSE(app, argc, argv);

    std::string raw;
    {
        std::ifstream is(input, std::ios::binary);
        if (!is) {
            std::cerr << "cannot read input: " << input << "\n";
            return kExitSchema;
        }
        std::ostringstream buf;
        buf << is.rdbuf();
        raw = buf.str();
    }

    JobContext ctx;
    ctx.mech = mech == "quantum" ? Mode::Quantum : Mode::Classical;
    ctx.sampled = mode == "sampled";
    ctx.seed = seed;
    ctx.tolerance = tolerance;
    ctx.outdir = output;

    int status = kExitOk;
    std::string command;
    try {
        std::error_code ec;
        fs::create_directories(ctx.outdir, ec);
        const Json job = Json::parse(raw);
        if (job.value("schema_version", kSchemaVersion) != kSchemaVersion)
            throw SchemaError("unsupported schema_version");
        command = job.at("command").get<std::string>();

        ctx.result["version"] = kVersion;
        ctx.result["schema_version"] = kSchemaVersion;
        ctx.result["input_hash"] = fnv1a_hex(raw);
        ctx.result["command"] = command;
        ctx.result["mode"] = mode;
        ctx.result["mech"] = mech;
        ctx.result["seed"] = seed;
        ctx.result["tolerance"] = tolerance;
        ctx.result["input"] = job;

        if (command == "Verify")
            run_verify(ctx, job);
        else if (command == "Solve")
            run_solve(ctx, job);
        else if (command == "Bracket")
            run_bracket(ctx, job);
        else if (command == "Trajectory")
            run_trajectory(ctx, job);
        else if (command == "Discriminant")
            run_discriminant(ctx, job);
        else if (command == "Catalog")
            run_catalog(ctx, job);
        else
            throw SchemaError("unknown command: " + command);
    } catch (const Json::exception& e) {
        std::cerr << "schema violation: " << e.what() << "\n";
        return kExitSchema;
    } catch (const SchemaError& e) {
        std::cerr << "schema violation: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "mathematical failure: " << e.what() << "\n";
        return kExitMath;
    }

    if (ctx.failed_residual) {
        ctx.result["failed_residual"] = *ctx.failed_residual;
        status = kExitTolerance;
    }
    ctx.result["status"] = status;
    try {
        write_atomic(ctx.outdir / "result.json", ctx.result.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "cannot write output: " << e.what() << "\n";
        return kExitSchema;
    }
    if (status == kExitTolerance)
        std::cerr << "tolerance breach: " << *ctx.failed_residual << "\n";
    return status;
}
