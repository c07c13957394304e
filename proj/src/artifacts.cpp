#include "dyadic/artifacts.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "dyadic-artifacts/1";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(std::move(w));
    return out;
}

std::string where(const fs::path& path, std::size_t line) {
    return path.filename().string() + ":" + std::to_string(line);
}

double to_double(std::string_view text, const std::string& context) {
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw InputError(context + ": '" + s + "' is not a number");
    return v;
}

template <typename Int>
Int to_int(std::string_view text, const std::string& context) {
    text = trim(text);
    Int v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw InputError(context + ": '" + std::string(text) + "' is not an integer");
    }
    return v;
}

NodeKey to_node(std::string_view text, const std::string& context) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InputError(context + ": expected k:alpha");
    return {to_int<int>(text.substr(0, colon), context),
            to_int<std::size_t>(text.substr(colon + 1), context)};
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path.string());
    return in;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw InputError("cannot write " + path.string());
}

void check_id(const std::string& id, const std::string& context) {
    if (id.empty()) throw InputError(context + ": empty point id");
    for (char ch : id) {
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == ':') {
            throw InputError(context + ": point id '" + id + "' contains whitespace, ',' or ':'");
        }
    }
}

std::vector<double> read_weights(const fs::path& path, const std::vector<std::string>& ids) {
    auto in = open_in(path);
    std::vector<double> weights(ids.size(), 1.0);
    std::vector<char> seen(ids.size(), 0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto w = words(line);
        if (w.empty()) continue;
        if (w.size() != 2) throw InputError(where(path, n) + ": expected 'id weight'");
        const auto it = index.find(w[0]);
        if (it == index.end()) throw InputError(where(path, n) + ": unknown point id '" + w[0] + "'");
        if (seen[it->second]) throw InputError(where(path, n) + ": duplicate weight for '" + w[0] + "'");
        seen[it->second] = 1;
        weights[it->second] = to_double(w[1], where(path, n));
    }
    return weights;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

FiniteSpace read_csv(const fs::path& path, const MetricSpec& metric, std::optional<double> declared_a0) {
    if (metric.base == BaseMetric::explicit_matrix) {
        throw InputError("CSV input needs a coordinate metric, not an explicit matrix");
    }
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty file, header row required");
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "id") {
        throw InputError(where(path, 1) + ": header must start with 'id'");
    }
    const bool weighted = header.size() >= 2 && header.back() == "weight";
    const std::size_t dim = header.size() - 1 - (weighted ? 1 : 0);
    if (dim == 0) throw InputError(where(path, 1) + ": header names no coordinate columns");

    std::vector<std::string> ids;
    std::vector<double> coords, weights;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        const std::string ctx = where(path, line_no);
        if (fields.size() != header.size()) {
            throw InputError(ctx + ": expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        check_id(fields[0], ctx);
        ids.push_back(fields[0]);
        for (std::size_t i = 1; i <= dim; ++i) {
            const double v = to_double(fields[i], ctx);
            if (!std::isfinite(v)) throw DataError(ctx + ": non-finite coordinate");
            coords.push_back(v);
        }
        weights.push_back(weighted ? to_double(fields.back(), ctx) : 1.0);
    }
    if (ids.empty()) throw InputError(path.string() + ": no data rows");
    return FiniteSpace::from_coordinates(std::move(ids), dim, std::move(coords), metric,
                                         std::move(weights), declared_a0);
}

FiniteSpace read_matrix(const fs::path& path, double declared_a0,
                        const std::optional<fs::path>& weights_path, double exponent) {
    auto in = open_in(path);
    std::string token;
    if (!(in >> token)) throw InputError(path.string() + ": empty file, expected n");
    const auto n = to_int<std::size_t>(token, path.string() + " (n)");
    if (n == 0) throw InputError(path.string() + ": n must be positive");
    if (n > 20000) throw InputError(path.string() + ": n too large for an explicit matrix");
    std::vector<double> matrix;
    matrix.reserve(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        if (!(in >> token)) {
            throw InputError(path.string() + ": expected " + std::to_string(n * n) + " entries, got " +
                             std::to_string(i));
        }
        matrix.push_back(to_double(token, path.string() + " (row " + std::to_string(i / n + 1) + ")"));
    }
    if (in >> token) throw InputError(path.string() + ": trailing data after the matrix");
    auto ids = sequential_ids(n);
    std::vector<double> weights(n, 1.0);
    if (weights_path) weights = read_weights(*weights_path, ids);
    return FiniteSpace::from_matrix(std::move(ids), std::move(matrix), std::move(weights), declared_a0,
                                    exponent);
}

Json BuildManifest::to_json(const Decomposition& dec) const {
    const FiniteSpace& s = *dec.space;
    Json generations = Json::array();
    for (const auto& gen : dec.cubes) {
        generations.push_back({{"k", gen.empty() ? 0 : gen.front().key.k}, {"cubes", gen.size()}});
    }
    return {{"format", kFormat},
            {"source", source},
            {"points", s.size()},
            {"metric", s.metric().tag()},
            {"declared_A0", s.declared_a0()},
            {"A0_mode", a0_mode},
            {"delta", dec.ledger.scale_ratio},
            {"a0", dec.ledger.ball_factor},
            {"relaxed", dec.ledger.relaxed},
            {"order", order},
            {"nested", nested},
            {"seed", seed ? Json(*seed) : Json(nullptr)},
            {"k_min", dec.ladder.k_min},
            {"k_max", dec.ladder.k_max},
            {"space_file", s.has_coordinates() ? "space.csv" : "space.matrix"},
            {"generations", std::move(generations)},
            {"fault", fault.empty() ? Json(nullptr) : Json(fault)}};
}

void write_artifacts(const Decomposition& dec, const BuildManifest& manifest, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    const FiniteSpace& s = *dec.space;
    for (const auto& id : s.ids()) check_id(id, "artifact dump");

    write_file(dir / "manifest.json", manifest.to_json(dec).dump(2) + "\n");
    write_file(dir / "ledger.json", ledger_json(dec.ledger).dump(2) + "\n");
    write_file(dir / "ledger.txt", ledger_text(dec.ledger));

    std::ostringstream space;
    if (s.has_coordinates()) {
        space << "id";
        for (std::size_t i = 1; i <= s.dimension(); ++i) space << ",x" << i;
        space << ",weight\n";
        for (PointIndex p = 0; p < s.size(); ++p) {
            space << s.id(p);
            for (double v : s.coordinates(p)) space << ',' << format_double(v);
            space << ',' << format_double(s.weight(p)) << '\n';
        }
        write_file(dir / "space.csv", space.str());
    } else {
        space << s.size() << '\n';
        const auto m = s.matrix();
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t j = 0; j < s.size(); ++j) {
                space << (j ? " " : "") << format_double(m[i * s.size() + j]);
            }
            space << '\n';
        }
        write_file(dir / "space.matrix", space.str());
        std::ostringstream w;
        for (PointIndex p = 0; p < s.size(); ++p) w << s.id(p) << ' ' << format_double(s.weight(p)) << '\n';
        write_file(dir / "weights.txt", w.str());
    }

    std::ostringstream nets;
    for (const auto& net : dec.nets) {
        for (std::size_t a = 0; a < net.centers.size(); ++a) {
            nets << net.k << ' ' << a << ' ' << s.id(net.centers[a]) << '\n';
        }
    }
    write_file(dir / "nets.txt", nets.str());
    write_file(dir / "tree.dot", tree_to_dot(s, dec.tree, dec.nets));
    write_file(dir / "tree.txt", tree_to_text(dec.tree));

    std::ostringstream cubes, members;
    for (const auto& gen : dec.cubes) {
        for (const auto& q : gen) {
            cubes << q.key.k << ' ' << q.key.alpha << ' ' << s.id(q.center) << ' ' << q.members.size()
                  << ' ' << format_double(q.measure) << ' ' << format_double(q.diameter) << ' ';
            if (q.key.k == dec.ladder.k_min) {
                cubes << '-';
            } else {
                cubes << dec.tree.parent(q.key).alpha;
            }
            cubes << '\n';
            members << q.key.str();
            for (PointIndex x : q.members) members << ' ' << s.id(x);
            members << '\n';
        }
    }
    write_file(dir / "cubes.txt", cubes.str());
    write_file(dir / "members.txt", members.str());
}

void write_report(const VerificationReport& report, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "report.json", report.to_json().dump(2) + "\n");
    write_file(dir / "report.txt", report.to_text());
}

LoadedArtifacts load_artifacts(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError("artifact directory " + dir.string() + " not found");
    Json manifest;
    {
        auto in = open_in(dir / "manifest.json");
        try {
            manifest = Json::parse(in);
        } catch (const Json::exception& e) {
            throw InputError("manifest.json: " + std::string(e.what()));
        }
    }
    int k_min = 0, k_max = 0;
    double declared = 1.0, delta = 0.5, a0 = 0.5;
    bool relaxed = false;
    std::string metric_tag, space_file;
    try {
        if (manifest.at("format").get<std::string>() != kFormat) {
            throw InputError("manifest.json: unsupported format");
        }
        k_min = manifest.at("k_min").get<int>();
        k_max = manifest.at("k_max").get<int>();
        declared = manifest.at("declared_A0").get<double>();
        delta = manifest.at("delta").get<double>();
        a0 = manifest.at("a0").get<double>();
        relaxed = manifest.at("relaxed").get<bool>();
        metric_tag = manifest.at("metric").get<std::string>();
        space_file = manifest.at("space_file").get<std::string>();
    } catch (const Json::exception& e) {
        throw InputError("manifest.json: " + std::string(e.what()));
    }
    if (k_min > k_max) throw InputError("manifest.json: k_min > k_max");

    const MetricSpec metric = MetricSpec::parse(metric_tag);
    std::shared_ptr<const FiniteSpace> space;
    if (space_file == "space.csv") {
        space = std::make_shared<const FiniteSpace>(read_csv(dir / "space.csv", metric, declared));
    } else if (space_file == "space.matrix") {
        space = std::make_shared<const FiniteSpace>(
            read_matrix(dir / "space.matrix", declared, dir / "weights.txt", metric.exponent));
    } else {
        throw InputError("manifest.json: unknown space_file '" + space_file + "'");
    }
    const FiniteSpace& s = *space;

    Decomposition dec;
    dec.space = space;
    dec.ledger = derive_constants(declared, delta, a0, relaxed);
    dec.ladder.scale_ratio = delta;
    dec.ladder.k_min = k_min;
    dec.ladder.k_max = k_max;
    const auto generations = static_cast<std::size_t>(dec.ladder.generations());

    dec.nets.resize(generations);
    for (std::size_t g = 0; g < generations; ++g) {
        dec.nets[g].k = k_min + static_cast<int>(g);
        dec.nets[g].separation = dec.ladder.scale(dec.nets[g].k);
        dec.nets[g].construction_order = manifest.value("order", std::string("by_id"));
        if (manifest.value("nested", false)) dec.nets[g].construction_order += "+nested";
    }
    {
        const fs::path path = dir / "nets.txt";
        auto in = open_in(path);
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto w = words(line);
            if (w.empty()) continue;
            const std::string ctx = where(path, n);
            if (w.size() != 3) throw InputError(ctx + ": expected 'k alpha point_id'");
            const int k = to_int<int>(w[0], ctx);
            const auto alpha = to_int<std::size_t>(w[1], ctx);
            if (!dec.ladder.contains(k)) throw InputError(ctx + ": generation outside the ladder");
            auto& net = dec.nets[dec.ladder.index(k)];
            if (alpha != net.centers.size()) throw InputError(ctx + ": alpha out of sequence");
            net.centers.push_back(s.index_of(w[2]));
        }
    }

    std::vector<std::size_t> counts;
    for (const auto& net : dec.nets) counts.push_back(net.centers.size());
    std::vector<std::vector<ParentLink>> links(generations);
    {
        const fs::path path = dir / "tree.txt";
        auto in = open_in(path);
        std::vector<std::vector<char>> seen(generations);
        for (std::size_t g = 1; g < generations; ++g) {
            links[g].resize(counts[g]);
            seen[g].assign(counts[g], 0);
        }
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto w = words(line);
            if (w.empty()) continue;
            const std::string ctx = where(path, n);
            if (w.size() != 3) throw InputError(ctx + ": expected 'k:alpha k-1:beta branch'");
            const NodeKey child = to_node(w[0], ctx), parent = to_node(w[1], ctx);
            if (child.k <= k_min || child.k > k_max || parent.k != child.k - 1) {
                throw InputError(ctx + ": link outside the ladder or not between consecutive generations");
            }
            const auto g = dec.ladder.index(child.k);
            if (child.alpha >= counts[g]) throw InputError(ctx + ": unknown child node");
            if (seen[g][child.alpha]) throw InputError(ctx + ": node linked twice");
            seen[g][child.alpha] = 1;
            LinkBranch branch;
            if (w[2] == "near") {
                branch = LinkBranch::near;
            } else if (w[2] == "fallback") {
                branch = LinkBranch::fallback;
            } else {
                throw InputError(ctx + ": branch must be near or fallback");
            }
            links[g][child.alpha] = {parent.alpha, branch};
        }
        for (std::size_t g = 1; g < generations; ++g) {
            for (std::size_t a = 0; a < counts[g]; ++a) {
                if (!seen[g][a]) {
                    throw InputError("tree.txt: node " + NodeKey{k_min + static_cast<int>(g), a}.str() +
                                     " has no parent link");
                }
            }
        }
    }
    try {
        dec.tree = OrderTree(k_min, counts, std::move(links));
    } catch (const InvariantError& e) {
        throw InputError(std::string("tree.txt: ") + e.what());
    }

    dec.cubes.resize(generations);
    for (std::size_t g = 0; g < generations; ++g) dec.cubes[g].resize(counts[g]);
    std::vector<std::vector<std::size_t>> declared_sizes(generations);
    {
        const fs::path path = dir / "cubes.txt";
        auto in = open_in(path);
        std::vector<std::vector<char>> seen(generations);
        for (std::size_t g = 0; g < generations; ++g) {
            seen[g].assign(counts[g], 0);
            declared_sizes[g].assign(counts[g], 0);
        }
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto w = words(line);
            if (w.empty()) continue;
            const std::string ctx = where(path, n);
            if (w.size() != 7) {
                throw InputError(ctx + ": expected 'k alpha center_id member_count measure diameter parent_alpha'");
            }
            const NodeKey key{to_int<int>(w[0], ctx), to_int<std::size_t>(w[1], ctx)};
            if (!dec.ladder.contains(key.k)) throw InputError(ctx + ": generation outside the ladder");
            const auto g = dec.ladder.index(key.k);
            if (key.alpha >= counts[g]) throw InputError(ctx + ": unknown cube");
            if (seen[g][key.alpha]) throw InputError(ctx + ": cube listed twice");
            seen[g][key.alpha] = 1;
            Cube& q = dec.cubes[g][key.alpha];
            q.key = key;
            q.center = s.index_of(w[2]);
            declared_sizes[g][key.alpha] = to_int<std::size_t>(w[3], ctx);
            q.measure = to_double(w[4], ctx);
            q.diameter = to_double(w[5], ctx);
        }
        for (std::size_t g = 0; g < generations; ++g) {
            for (std::size_t a = 0; a < counts[g]; ++a) {
                if (!seen[g][a]) {
                    throw InputError("cubes.txt: missing cube " +
                                     NodeKey{k_min + static_cast<int>(g), a}.str());
                }
            }
        }
    }
    {
        const fs::path path = dir / "members.txt";
        auto in = open_in(path);
        std::vector<std::vector<char>> seen(generations);
        for (std::size_t g = 0; g < generations; ++g) seen[g].assign(counts[g], 0);
        std::string line;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            const auto w = words(line);
            if (w.empty()) continue;
            const std::string ctx = where(path, n);
            const NodeKey key = to_node(w[0], ctx);
            if (!dec.ladder.contains(key.k)) throw InputError(ctx + ": generation outside the ladder");
            const auto g = dec.ladder.index(key.k);
            if (key.alpha >= counts[g]) throw InputError(ctx + ": unknown cube");
            if (seen[g][key.alpha]) throw InputError(ctx + ": cube listed twice");
            seen[g][key.alpha] = 1;
            auto& members = dec.cubes[g][key.alpha].members;
            for (std::size_t i = 1; i < w.size(); ++i) members.push_back(s.index_of(w[i]));
            if (members.size() != declared_sizes[g][key.alpha]) {
                throw InputError(ctx + ": member count disagrees with cubes.txt");
            }
        }
        for (std::size_t g = 0; g < generations; ++g) {
            for (std::size_t a = 0; a < counts[g]; ++a) {
                if (!seen[g][a]) {
                    throw InputError("members.txt: missing cube " +
                                     NodeKey{k_min + static_cast<int>(g), a}.str());
                }
            }
        }
    }
    dec.uncovered = uncovered_sets(s, dec.cubes);
    return {std::move(dec), std::move(manifest)};
}

} // namespace dyadic
