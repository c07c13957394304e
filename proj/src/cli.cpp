#include "dyadic/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dyadic/artifacts.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/faults.hpp"
#include "dyadic/generators.hpp"
#include "dyadic/pipeline.hpp"
#include "dyadic/verify.hpp"

namespace dyadic {

namespace fs = std::filesystem;

namespace {

struct SourceOptions {
    std::string gen, input, matrix, weights;
    std::string metric;
    std::string a0_mode = "auto";
    std::string delta = "default", ball = "default";
    bool relaxed = false;
    std::uint64_t seed = 0;
    CLI::Option* seed_option = nullptr;
    std::string order = "by_id";
    bool nested = false;
    std::string out;

    bool has_source() const { return !gen.empty() || !input.empty() || !matrix.empty(); }
    std::optional<std::uint64_t> maybe_seed() const {
        if (seed_option && seed_option->count() > 0) return seed;
        return std::nullopt;
    }
};

void add_source_options(CLI::App* cmd, SourceOptions& o) {
    auto* gen = cmd->add_option("--gen", o.gen,
                                "generator: grid:WxH[:spacing], line:N, uniform:N:seed, "
                                "clustered:N:clusters:seed, snowflake(inner,eps)");
    auto* input = cmd->add_option("--input", o.input, "CSV file with header id,x1..xd[,weight]");
    auto* matrix = cmd->add_option("--matrix", o.matrix, "distance matrix file (n, then n rows)");
    gen->excludes(input)->excludes(matrix);
    input->excludes(matrix);
    cmd->add_option("--weights", o.weights, "'id weight' lines for --matrix")->needs(matrix);
    cmd->add_option("--metric", o.metric,
                    "euclidean, lp:P, explicit or snowflake(base,eps); for --input and --matrix");
    cmd->add_option("--A0", o.a0_mode, "declared, estimate or a number >= 1 (default: declared "
                                       "when a closed form exists, else estimate)");
    cmd->add_option("--delta", o.delta, "scale ratio, or 'default'");
    cmd->add_option("--a0", o.ball, "ball factor, or 'default'");
    cmd->add_flag("--relaxed", o.relaxed, "report parameter-bound violations instead of refusing");
    o.seed_option = cmd->add_option("--seed", o.seed, "seed for every sampled step");
    cmd->add_option("--order", o.order, "net scan order: by_id or shuffle");
    cmd->add_flag("--nested", o.nested, "seed each net with the previous generation's centers");
}

std::optional<double> parse_parameter(const std::string& text, const char* name) {
    if (text == "default") return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InputError(std::string("--") + name + " must be a number or 'default', got '" + text + "'");
    }
    return v;
}

std::uint64_t require_seed(const SourceOptions& o, const std::string& why) {
    const auto seed = o.maybe_seed();
    if (!seed) throw InputError("--seed is required: " + why);
    return *seed;
}

// Two distinct points at distance zero make rho a pseudo-metric only.
void require_identity(const FiniteSpace& s) {
    for (PointIndex a = 0; a < s.size(); ++a) {
        for (PointIndex b = a + 1; b < s.size(); ++b) {
            if (s.distance(a, b) == 0.0) {
                throw DataError("points '" + s.id(a) + "' and '" + s.id(b) + "' are at distance 0");
            }
        }
    }
}

struct Built {
    Decomposition dec;
    BuildManifest manifest;
};

Built build_from(const SourceOptions& o) {
    if (!o.has_source()) throw InputError("one of --gen, --input or --matrix is required");
    BuildManifest manifest;
    manifest.seed = o.maybe_seed();
    manifest.nested = o.nested;

    std::optional<FiniteSpace> space;
    if (!o.gen.empty()) {
        if (!o.metric.empty()) throw InputError("--metric applies to --input and --matrix only");
        space = generate(o.gen);
        manifest.source = "generator " + o.gen;
    } else if (!o.input.empty()) {
        const auto metric = MetricSpec::parse(o.metric.empty() ? "euclidean" : o.metric);
        space = read_csv(o.input, metric);
        manifest.source = "csv " + o.input;
    } else {
        const auto metric = MetricSpec::parse(o.metric.empty() ? "explicit" : o.metric);
        if (metric.base != BaseMetric::explicit_matrix) {
            throw InputError("--matrix needs the explicit metric, optionally snowflaked");
        }
        std::optional<fs::path> weights;
        if (!o.weights.empty()) weights = o.weights;
        space = read_matrix(o.matrix, 1.0, weights, metric.exponent);
        manifest.source = "matrix " + o.matrix;
    }
    require_identity(*space);

    const auto analytic = space->metric().analytic_a0();
    std::string mode = o.a0_mode;
    if (mode == "auto") mode = analytic ? "declared" : "estimate";
    if (mode == "declared") {
        if (!analytic) {
            throw InputError("metric '" + space->metric().tag() +
                             "' has no closed-form A0; pass --A0 estimate or a number");
        }
        space = space->with_declared_a0(*analytic);
    } else if (mode == "estimate") {
        ValidationMode vm = ValidationMode::exhaustive();
        if (space->size() > ValidationMode::kExhaustiveLimit) {
            vm = ValidationMode::automatic(space->size(),
                                           require_seed(o, "A0 estimation samples triples above " +
                                                               std::to_string(ValidationMode::kExhaustiveLimit) +
                                                               " points"));
        }
        double estimate = 1.0;
        if (space->size() >= 2) estimate = std::max(1.0, validate_quasimetric(*space, vm).a0_emp);
        space = space->with_declared_a0(estimate);
    } else {
        const auto value = parse_parameter(mode, "A0");
        if (!value) throw InputError("--A0 must be declared, estimate or a number");
        space = space->with_declared_a0(*value);
        mode = "value";
    }
    manifest.a0_mode = mode;

    BuildOptions options;
    options.scale_ratio = parse_parameter(o.delta, "delta");
    options.ball_factor = parse_parameter(o.ball, "a0");
    options.relaxed = o.relaxed;
    options.nested = o.nested;
    if (o.order == "by_id") {
        options.order = NetOrder::by_id();
    } else if (o.order == "shuffle") {
        options.order = NetOrder::seeded_shuffle(require_seed(o, "--order shuffle draws a permutation"));
    } else {
        throw InputError("--order must be by_id or shuffle");
    }
    manifest.order = options.order.tag();

    auto shared = std::make_shared<const FiniteSpace>(std::move(*space));
    return {decompose(std::move(shared), options), std::move(manifest)};
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("DYADIC_OUT"); env && *env) return env;
    return "dyadic_out";
}

void print_summary(const Decomposition& dec, std::ostream& out) {
    const FiniteSpace& s = *dec.space;
    std::size_t n0 = 0;
    for (int k = dec.ladder.k_min; k < dec.ladder.k_max; ++k) {
        for (std::size_t a = 0; a < dec.tree.count(k); ++a) {
            n0 = std::max(n0, dec.tree.children({k, a}).size());
        }
    }
    out << "points " << s.size() << "  metric " << s.metric().tag() << "  A0 "
        << format_double(s.declared_a0()) << '\n';
    out << "delta " << format_double(dec.ledger.scale_ratio) << "  a0 "
        << format_double(dec.ledger.ball_factor) << (dec.ledger.relaxed ? "  (relaxed)" : "") << '\n';
    out << "generations " << dec.ladder.generations() << " (k = " << dec.ladder.k_min << " .. "
        << dec.ladder.k_max << ")\n";
    out << "cubes [";
    for (std::size_t g = 0; g < dec.cubes.size(); ++g) out << (g ? ", " : "") << dec.cubes[g].size();
    out << "]\n";
    out << "N0_emp " << n0 << '\n';
    for (const auto& b : dec.ledger.violated_bounds()) {
        out << "warning: " << b.parameter << " violates " << b.expression << '\n';
    }
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto v = parse_parameter(item, "t-grid");
        if (!v) throw InputError("--t-grid takes numbers");
        grid.push_back(*v);
    }
    if (grid.empty()) throw InputError("--t-grid is empty");
    return grid;
}

// Storage behind every subcommand's options.
struct CliState {
    SourceOptions build, verify;
    std::string verify_artifacts, t_grid;
    double a1 = 1.0;
    std::string query_dir, query_point;
    int query_k = 0;
    std::string inject_dir, inject_fault, inject_out;
    std::uint64_t inject_seed = 0;
    double ledger_a0 = 1.0;
    std::string ledger_delta = "default", ledger_ball = "default";
    bool ledger_relaxed = false, ledger_json = false;
};

int dispatch(CLI::App& app, const CliState& st, std::ostream& out) {
    if (app.got_subcommand("build")) {
        const auto built = build_from(st.build);
        const fs::path dir = output_dir(st.build.out);
        write_artifacts(built.dec, built.manifest, dir);
        print_summary(built.dec, out);
        out << "artifacts " << dir.string() << '\n';
        return exit_code::ok;
    }
    if (app.got_subcommand("verify")) {
        auto* cmd = app.get_subcommand("verify");
        VerifyOptions options;
        if (cmd->get_option("--A1")->count() > 0) options.doubling_constant = st.a1;
        if (!st.t_grid.empty()) options.t_grid = parse_grid(st.t_grid);
        Decomposition dec;
        fs::path dir;
        std::optional<std::uint64_t> seed = st.verify.maybe_seed();
        if (!st.verify_artifacts.empty()) {
            if (st.verify.has_source()) throw InputError("pass either --artifacts or a source, not both");
            auto loaded = load_artifacts(st.verify_artifacts);
            dec = std::move(loaded.dec);
            dir = st.verify_artifacts;
            if (!seed && loaded.manifest.contains("seed") && loaded.manifest["seed"].is_number()) {
                seed = loaded.manifest["seed"].get<std::uint64_t>();
            }
        } else {
            auto built = build_from(st.verify);
            dir = output_dir(st.verify.out);
            write_artifacts(built.dec, built.manifest, dir);
            dec = std::move(built.dec);
        }
        if (dec.space->size() > ValidationMode::kExhaustiveLimit && !seed) {
            throw InputError("--seed is required: the quasi-triangle check samples triples above " +
                             std::to_string(ValidationMode::kExhaustiveLimit) + " points");
        }
        options.seed = seed.value_or(0);
        const auto report = run_suite(dec, options);
        write_report(report, dir);
        out << report.to_text();
        out << "report " << (dir / "report.json").string() << '\n';
        return report.any_failed() ? exit_code::verification_failed : exit_code::ok;
    }
    if (app.got_subcommand("query")) {
        const auto loaded = load_artifacts(st.query_dir);
        const Decomposition& dec = loaded.dec;
        const PointIndex x = dec.space->index_of(st.query_point);
        const auto cube = locate(dec, x, st.query_k);
        if (!cube) {
            out << "point " << st.query_point << " uncovered at k=" << st.query_k << '\n';
            return exit_code::ok;
        }
        out << "point " << st.query_point << " at k=" << st.query_k << ": cube " << cube->str() << " center "
            << dec.space->id(dec.cube(*cube).center) << '\n';
        out << "lineage";
        for (const auto& n : lineage(dec.tree, *cube)) out << ' ' << n.str();
        out << '\n';
        return exit_code::ok;
    }
    if (app.got_subcommand("inject")) {
        if (fs::exists(st.inject_out) && fs::equivalent(st.inject_out, st.inject_dir)) {
            throw InputError("--out must differ from --artifacts");
        }
        auto loaded = load_artifacts(st.inject_dir);
        const auto fault = inject_fault(loaded.dec, parse_fault(st.inject_fault), st.inject_seed);
        BuildManifest manifest;
        const auto& m = loaded.manifest;
        manifest.source = m.value("source", std::string());
        manifest.a0_mode = m.value("A0_mode", std::string());
        if (m.contains("seed") && m["seed"].is_number()) manifest.seed = m["seed"].get<std::uint64_t>();
        manifest.nested = m.value("nested", false);
        manifest.order = m.value("order", std::string("by_id"));
        manifest.fault = std::string(to_string(fault.kind)) + ": " + fault.description;
        write_artifacts(fault.dec, manifest, st.inject_out);
        out << manifest.fault << '\n' << "artifacts " << st.inject_out << '\n';
        return exit_code::ok;
    }
    if (app.got_subcommand("ledger")) {
        const auto delta = parse_parameter(st.ledger_delta, "delta");
        const auto ball = parse_parameter(st.ledger_ball, "a0");
        const auto ledger = derive_constants(st.ledger_a0, delta, ball, st.ledger_relaxed);
        if (st.ledger_json) {
            Json j = ledger_json(ledger);
            j["C6"] = {{"value", ledger.boundary_spread_factor()},
                       {"expression", "A0 (C1 + C4) / (delta C5)"}};
            out << j.dump(2) << '\n';
        } else {
            out << ledger_text(ledger);
        }
        return exit_code::ok;
    }
    out << app.help();
    return exit_code::input;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dyadic cube decompositions of finite quasi-metric measure spaces", "dyadic"};
    app.require_subcommand(1);

    CliState st;
    auto* build_cmd = app.add_subcommand("build", "construct a decomposition and write its artifacts");
    add_source_options(build_cmd, st.build);
    build_cmd->add_option("--out", st.build.out, "output directory (default $DYADIC_OUT or ./dyadic_out)");

    auto* verify_cmd = app.add_subcommand("verify", "run the property suite on artifacts or a fresh build");
    add_source_options(verify_cmd, st.verify);
    verify_cmd->add_option("--artifacts", st.verify_artifacts, "artifact directory from 'build'");
    verify_cmd->add_option("--out", st.verify.out, "output directory for a fresh build");
    verify_cmd->add_option("--A1", st.a1, "doubling constant (default: estimated)");
    verify_cmd->add_option("--t-grid", st.t_grid, "comma-separated boundary widths t");

    auto* query_cmd = app.add_subcommand("query", "locate a point and print its lineage");
    query_cmd->add_option("--artifacts", st.query_dir, "artifact directory")->required();
    query_cmd->add_option("--point", st.query_point, "point id")->required();
    query_cmd->add_option("--k", st.query_k, "generation")->required();

    auto* inject_cmd = app.add_subcommand("inject", "write a corrupted copy of some artifacts");
    inject_cmd->add_option("--artifacts", st.inject_dir, "artifact directory")->required();
    inject_cmd->add_option("--fault", st.inject_fault,
                           "reparent, delete_member, inflate_ball, break_separation or zero_weight")
        ->required();
    inject_cmd->add_option("--seed", st.inject_seed, "target selection seed")->required();
    inject_cmd->add_option("--out", st.inject_out, "output directory")->required();

    auto* ledger_cmd = app.add_subcommand("ledger", "print the constant ledger");
    ledger_cmd->add_option("--A0", st.ledger_a0, "quasi-triangle constant");
    ledger_cmd->add_option("--delta", st.ledger_delta, "scale ratio, or 'default'");
    ledger_cmd->add_option("--a0", st.ledger_ball, "ball factor, or 'default'");
    ledger_cmd->add_flag("--relaxed", st.ledger_relaxed, "flag violated bounds instead of refusing");
    ledger_cmd->add_flag("--json", st.ledger_json, "machine-readable output");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input;
    }

    try {
        return dispatch(app, st, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return exit_code::input;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_code::data;
    } catch (const ConstraintError& e) {
        err << "constraint error: " << e.what() << '\n';
        return exit_code::constraint;
    } catch (const MaterializationError& e) {
        err << "materialization error: " << e.what() << '\n';
        return exit_code::construction;
    } catch (const InvariantError& e) {
        err << "invariant error: " << e.what() << '\n';
        return exit_code::construction;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return exit_code::input;
    }
}

} // namespace dyadic
