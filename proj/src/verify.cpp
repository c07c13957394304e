#include "dyadic/verify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

std::string_view to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "not_applicable";
    }
    return "unknown";
}

Json CheckResult::to_json() const {
    Json j = {{"name", name}, {"property", property}, {"status", to_string(status)},
              {"violations", violations}};
    if (!witnesses.empty()) j["witnesses"] = witnesses;
    if (!numbers.empty()) j["numbers"] = numbers;
    if (!note.empty()) j["note"] = note;
    return j;
}

namespace {

using Membership = std::vector<std::vector<std::size_t>>; // point -> cubes of one generation

std::vector<Membership> membership(const Decomposition& dec) {
    std::vector<Membership> out(dec.cubes.size(), Membership(dec.space->size()));
    for (std::size_t g = 0; g < dec.cubes.size(); ++g) {
        for (const auto& q : dec.cubes[g]) {
            for (PointIndex x : q.members) out[g][x].push_back(q.key.alpha);
        }
    }
    return out;
}

// Everything the checks share.
struct Context {
    const Decomposition& dec;
    const FiniteSpace& space;
    std::vector<Membership> members_of;
    std::vector<char> in_core;

    explicit Context(const Decomposition& d) : dec(d), space(*d.space), members_of(membership(d)) {
        in_core.assign(space.size(), 1);
        for (const auto& set : uncovered_sets(space, dec.cubes)) {
            for (PointIndex x : set) in_core[x] = 0;
        }
    }

    Json node(NodeKey key) const { return node_json(space, dec.nets, key); }
    Json point(PointIndex x) const { return space.id(x); }
    int k_of(std::size_t g) const { return dec.ladder.k_min + static_cast<int>(g); }
};

CheckResult check_quasi_triangle(const Context& c, const VerifyOptions& options, Json& constants) {
    CheckResult r("quasi_triangle",
                  "rho(x,z) <= A0 (rho(x,y) + rho(y,z)); rho symmetric; rho(x,y) = 0 iff x = y");
    if (c.space.size() < 2) {
        r.not_applicable("a single point has no triples");
        constants["A0_emp"] = 1.0;
        return r;
    }
    const auto mode = ValidationMode::automatic(c.space.size(), options.seed, options.sampled_triples);
    const auto rep = validate_quasimetric(c.space, mode);
    for (const auto& t : rep.violations) {
        r.fail({{"x", c.point(t.x)}, {"y", c.point(t.y)}, {"z", c.point(t.z)}, {"ratio", t.ratio},
                {"declared_A0", c.space.declared_a0()}});
    }
    for (const auto& d : rep.asymmetric) {
        r.fail({{"a", c.point(d.a)}, {"b", c.point(d.b)}, {"forward", d.forward},
                {"backward", d.backward}, {"defect", "asymmetric"}});
    }
    for (const auto& d : rep.identity) {
        r.fail({{"a", c.point(d.a)}, {"b", c.point(d.b)}, {"distance", d.forward},
                {"defect", "identity"}});
    }
    r.violations = rep.violation_count + rep.asymmetric.size() + rep.identity.size();
    if (r.violations > 0) r.status = CheckStatus::fail;
    r.numbers["A0_emp"] = rep.a0_emp;
    r.numbers["declared_A0"] = c.space.declared_a0();
    r.numbers["triples_scanned"] = rep.triples_scanned;
    r.numbers["exhaustive"] = rep.exhaustive;
    if (!rep.exhaustive) r.numbers["seed"] = options.seed;
    if (rep.witness) {
        r.numbers["witness"] = {c.point(rep.witness->x), c.point(rep.witness->y),
                                c.point(rep.witness->z)};
    }
    constants["A0_emp"] = rep.a0_emp;
    return r;
}

std::pair<CheckResult, CheckResult> check_nets(const Context& c) {
    CheckResult sep("net_separation", "rho(z^k_a, z^k_b) >= delta^k for a != b");
    CheckResult max("net_maximality", "every x has some a with rho(x, z^k_a) < delta^k");
    std::size_t pairs = 0;
    for (const auto& net : c.dec.nets) {
        const auto& z = net.centers;
        std::vector<char> is_center(c.space.size(), 0);
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (z[i] >= c.space.size() || is_center[z[i]]) {
                sep.fail({{"k", net.k}, {"alpha", i}, {"reason", "duplicate or unknown center"}});
                continue;
            }
            is_center[z[i]] = 1;
            for (std::size_t j = 0; j < i; ++j) {
                ++pairs;
                const double d = c.space.distance(z[j], z[i]);
                if (c.space.less(d, net.separation)) {
                    sep.fail({{"k", net.k}, {"first", c.node({net.k, j})}, {"second", c.node({net.k, i})},
                              {"distance", d}, {"separation", net.separation}});
                }
            }
        }
        for (PointIndex x = 0; x < c.space.size(); ++x) {
            if (is_center[x]) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (PointIndex y : z) nearest = std::min(nearest, c.space.distance(x, y));
            if (!c.space.less(nearest, net.separation)) {
                max.fail({{"k", net.k}, {"addable", c.point(x)}, {"nearest_center_distance", nearest},
                          {"separation", net.separation}});
            }
        }
    }
    sep.numbers["pairs"] = pairs;
    max.numbers["generations"] = c.dec.nets.size();
    return {sep, max};
}

CheckResult check_cube_records(const Context& c) {
    CheckResult r("cube_records",
                  "z^k_a in Q^k_a; 0 < mu(Q) < infinity equals the sum of member weights; "
                  "diameter is the exact maximum pairwise distance");
    for (std::size_t g = 0; g < c.dec.cubes.size(); ++g) {
        for (const auto& q : c.dec.cubes[g]) {
            Json w = {{"cube", c.node(q.key)}};
            const bool sorted = std::is_sorted(q.members.begin(), q.members.end()) &&
                                std::adjacent_find(q.members.begin(), q.members.end()) ==
                                    q.members.end() &&
                                (q.members.empty() || q.members.back() < c.space.size());
            if (!sorted) {
                w["reason"] = "member list not a sorted set of points";
                r.fail(w);
                continue;
            }
            if (q.center != c.dec.nets[g].centers[q.key.alpha] ||
                !std::binary_search(q.members.begin(), q.members.end(), q.center)) {
                w["reason"] = "center missing from members";
                r.fail(w);
            }
            const double mu = c.space.measure(q.members);
            if (!(q.measure > 0.0) || !std::isfinite(q.measure) || q.measure != mu) {
                w["reason"] = "measure";
                w["stored"] = q.measure;
                w["recomputed"] = mu;
                r.fail(w);
            }
            const double diam = diameter(c.space, q.members);
            if (q.diameter != diam) {
                w["reason"] = "diameter";
                w["stored"] = q.diameter;
                w["recomputed"] = diam;
                r.fail(w);
            }
        }
    }
    r.numbers["cubes"] = c.dec.cube_count();
    return r;
}

// Members must equal the union of B(z^l_b, a0 delta^l) over all descendants.
CheckResult check_cube_definition(const Context& c) {
    CheckResult r("cube_definition", "Q^k_a = union of B(z^l_b, a0 delta^l) over (l,b) below (k,a)");
    const auto& dec = c.dec;
    std::vector<std::vector<PointSet>> balls(dec.cubes.size());
    for (std::size_t g = 0; g < dec.cubes.size(); ++g) {
        const double radius = dec.ledger.ball_factor * dec.ladder.scale(c.k_of(g));
        for (PointIndex z : dec.nets[g].centers) balls[g].push_back(ball_members(c.space, z, radius));
    }
    std::vector<char> mask(c.space.size());
    for (std::size_t g = 0; g < dec.cubes.size(); ++g) {
        for (const auto& q : dec.cubes[g]) {
            std::fill(mask.begin(), mask.end(), 0);
            std::vector<NodeKey> stack{q.key};
            while (!stack.empty()) {
                const NodeKey n = stack.back();
                stack.pop_back();
                for (PointIndex x : balls[dec.ladder.index(n.k)][n.alpha]) mask[x] = 1;
                if (n.k < dec.ladder.k_max) {
                    for (std::size_t ch : dec.tree.children(n)) stack.push_back({n.k + 1, ch});
                }
            }
            PointSet expected;
            for (PointIndex x = 0; x < mask.size(); ++x) {
                if (mask[x]) expected.push_back(x);
            }
            if (expected != q.members) {
                PointSet extra, missing;
                std::set_difference(q.members.begin(), q.members.end(), expected.begin(),
                                    expected.end(), std::back_inserter(extra));
                std::set_difference(expected.begin(), expected.end(), q.members.begin(),
                                    q.members.end(), std::back_inserter(missing));
                Json w = {{"cube", c.node(q.key)}};
                if (!extra.empty()) w["extra"] = c.point(extra.front());
                if (!missing.empty()) w["missing"] = c.point(missing.front());
                w["extra_count"] = extra.size();
                w["missing_count"] = missing.size();
                r.fail(w);
            }
        }
    }
    return r;
}

std::pair<CheckResult, CheckResult> check_balls(const Context& c, Json& constants) {
    CheckResult inner("inner_ball", "B(z^k_a, a0 delta^k) inside Q^k_a");
    CheckResult strong("strong_inner_ball", "B(z^k_a, C3 delta^k) n X^ inside Q^k_a");
    auto witness = [&](const Cube& q, const BallInclusion& b) {
        Json w = {{"cube", c.node(q.key)}, {"point", c.point(b.witness)}, {"distance", b.distance},
                  {"radius", b.radius}};
        w["located_in"] = b.witness_cube ? c.node(*b.witness_cube) : Json(nullptr);
        return w;
    };
    for (const auto& gen : c.dec.cubes) {
        for (const auto& q : gen) {
            const auto v = strong_inner_ball_check(c.dec, q.key, c.in_core);
            if (!v.inner.holds) inner.fail(witness(q, v.inner));
            if (!v.strong.holds) strong.fail(witness(q, v.strong));
        }
    }
    const auto core = std::count(c.in_core.begin(), c.in_core.end(), 1);
    strong.numbers["core_size"] = core;
    strong.numbers["C3"] = c.dec.ledger.strong_inner_factor;
    inner.numbers["a0"] = c.dec.ledger.ball_factor;
    constants["core_size"] = core;
    return {inner, strong};
}

CheckResult check_outer_ball(const Context& c) {
    CheckResult r("outer_ball", "Q^k_a inside B(z^k_a, C1 delta^k) and diam(Q^k_a) <= C1 delta^k");
    const double c1 = c.dec.ledger.diameter_factor;
    double worst = 0.0;
    for (const auto& gen : c.dec.cubes) {
        for (const auto& q : gen) {
            const double bound = c1 * c.dec.ladder.scale(q.key.k);
            const double diam = diameter(c.space, q.members);
            worst = std::max(worst, diam / c.dec.ladder.scale(q.key.k));
            if (!c.space.less_equal(diam, bound)) {
                r.fail({{"cube", c.node(q.key)}, {"diameter", diam}, {"bound", bound}});
            }
            for (PointIndex x : q.members) {
                const double d = c.space.distance(q.center, x);
                if (!c.space.less(d, bound)) {
                    r.fail({{"cube", c.node(q.key)}, {"point", c.point(x)}, {"distance", d},
                            {"bound", bound}});
                }
            }
        }
    }
    r.numbers["C1"] = c1;
    r.numbers["max_diameter_over_scale"] = worst;
    return r;
}

// For l < k every cube has exactly one generation-l cube containing it.
CheckResult check_cube_ancestor(const Context& c) {
    CheckResult r("cube_ancestor", "for l < k exactly one b has Q^k_a inside Q^l_b");
    const auto& dec = c.dec;
    for (std::size_t g = 1; g < dec.cubes.size(); ++g) {
        for (const auto& q : dec.cubes[g]) {
            if (q.members.empty()) {
                r.fail({{"cube", c.node(q.key)}, {"reason", "empty cube"}});
                continue;
            }
            for (std::size_t h = 0; h < g; ++h) {
                std::size_t found = 0;
                for (std::size_t b : c.members_of[h][q.members.front()]) {
                    const auto& m = dec.cubes[h][b].members;
                    if (std::includes(m.begin(), m.end(), q.members.begin(), q.members.end())) ++found;
                }
                if (found != 1) {
                    r.fail({{"cube", c.node(q.key)}, {"l", c.k_of(h)}, {"containing_cubes", found}});
                }
            }
        }
    }
    return r;
}

CheckResult check_disjointness(const Context& c) {
    CheckResult r("disjointness", "Q^k_a n Q^k_b nonempty implies a = b");
    for (std::size_t g = 0; g < c.dec.cubes.size(); ++g) {
        for (PointIndex x = 0; x < c.space.size(); ++x) {
            const auto& owners = c.members_of[g][x];
            if (owners.size() > 1) {
                r.fail({{"first", c.node({c.k_of(g), owners[0]})},
                        {"second", c.node({c.k_of(g), owners[1]})},
                        {"point", c.point(x)}});
            }
        }
    }
    return r;
}

// Nesting and order/containment share the same intersection counts:
// for each finer cube, how many of its points each coarser cube holds.
std::pair<CheckResult, CheckResult> check_nesting(const Context& c) {
    CheckResult nest("nesting", "for l >= k: Q^l_b inside Q^k_a or Q^l_b n Q^k_a empty");
    CheckResult order("order_containment",
                      "for l >= k: (l,b) below (k,a) iff Q^l_b inside Q^k_a; otherwise disjoint");
    const auto& dec = c.dec;
    std::size_t pairs = 0;
    std::vector<std::size_t> hits;
    std::vector<std::size_t> touched;
    for (std::size_t h = 0; h < dec.cubes.size(); ++h) {
        hits.assign(dec.cubes[h].size(), 0);
        for (std::size_t g = h; g < dec.cubes.size(); ++g) {
            for (const auto& q : dec.cubes[g]) {
                touched.clear();
                for (PointIndex x : q.members) {
                    for (std::size_t a : c.members_of[h][x]) {
                        if (hits[a]++ == 0) touched.push_back(a);
                    }
                }
                std::sort(touched.begin(), touched.end());
                const NodeKey anc = ancestor_of(dec.tree, q.key, c.k_of(h));
                pairs += dec.cubes[h].size();
                bool saw_anc = false;
                for (std::size_t a : touched) {
                    if (g == h && a == q.key.alpha) {
                        saw_anc = true;
                        continue;
                    }
                    const NodeKey other{c.k_of(h), a};
                    const bool subset = hits[a] == q.members.size();
                    Json w = {{"finer", c.node(q.key)}, {"coarser", c.node(other)},
                              {"shared_points", hits[a]}, {"finer_size", q.members.size()}};
                    if (!subset) nest.fail(w);
                    if (a == anc.alpha) {
                        saw_anc = true;
                        if (!subset) order.fail(w);
                    } else {
                        w["ancestor"] = c.node(anc);
                        order.fail(w);
                    }
                }
                if (!saw_anc && !q.members.empty()) {
                    order.fail({{"finer", c.node(q.key)}, {"coarser", c.node(anc)},
                                {"shared_points", 0}, {"finer_size", q.members.size()}});
                }
                for (std::size_t a : touched) hits[a] = 0;
            }
        }
    }
    nest.numbers["cube_pairs"] = pairs;
    nest.numbers["exhaustive"] = true;
    order.numbers["cube_pairs"] = pairs;
    return {nest, order};
}

CheckResult check_children(const Context& c, Json& constants) {
    CheckResult r("children_bound",
                  "#children(Q^k_a) <= #{z in Z_{k+1} : rho(z^k_a, z) < C1 delta^k} <= N0");
    const auto& dec = c.dec;
    const double factor = dec.ledger.diameter_factor / dec.ledger.scale_ratio;
    std::size_t n0 = 0;
    std::size_t packing = 0;
    for (std::size_t g = 0; g + 1 < dec.cubes.size(); ++g) {
        const Net& finer = dec.nets[g + 1];
        for (PointIndex x = 0; x < c.space.size(); ++x) {
            packing = std::max(packing, packing_count(c.space, finer, x, factor));
        }
        for (const auto& q : dec.cubes[g]) {
            const std::size_t count = dec.tree.children(q.key).size();
            n0 = std::max(n0, count);
            const std::size_t local = packing_count(c.space, finer, q.center, factor);
            if (count > local) {
                r.fail({{"cube", c.node(q.key)}, {"children", count}, {"packing_count", local},
                        {"K", factor}});
            }
        }
    }
    if (n0 > packing) r.fail({{"N0_emp", n0}, {"packing_bound", packing}, {"K", factor}});
    r.numbers["N0_emp"] = n0;
    r.numbers["packing_bound"] = packing;
    r.numbers["K"] = factor;
    constants["N0_emp"] = n0;
    constants["packing_bound"] = packing;
    return r;
}

CheckResult check_coverage(const Context& c) {
    CheckResult r("coverage", "X minus the union of generation-k cubes is empty (measure zero)");
    const auto recomputed = uncovered_sets(c.space, c.dec.cubes);
    for (std::size_t g = 0; g < recomputed.size(); ++g) {
        const auto& set = recomputed[g];
        if (g >= c.dec.uncovered.size() || c.dec.uncovered[g] != set) {
            r.fail({{"k", c.k_of(g)}, {"reason", "stored uncovered set is stale"}});
        }
        if (!set.empty()) {
            r.fail({{"k", c.k_of(g)}, {"uncovered", set.size()}, {"first", c.point(set.front())},
                    {"measure", c.space.measure(set)}});
        }
    }
    return r;
}

std::vector<double> ascending(std::span<const double> grid) {
    std::vector<double> t(grid.begin(), grid.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

void require_grid(std::span<const double> grid) {
    if (grid.empty()) throw InputError("t grid is empty");
    for (double t : grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t grid values must be positive");
    }
}

CheckResult check_layers(const Context& c, std::span<const double> grid) {
    CheckResult r("boundary_layers", "mu(layer_t(Q)) non-decreasing in t and <= mu(Q)");
    const auto t = ascending(grid);
    std::size_t rows = 0;
    for (const auto& gen : c.dec.cubes) {
        for (const auto& q : gen) {
            const auto ext = exterior_distances(c.dec, q.key);
            const double mu = c.space.measure(q.members);
            double previous = 0.0;
            PointSet previous_members;
            for (double ti : t) {
                const auto layer = boundary_layer(c.dec, q.key, ti, ext);
                ++rows;
                if (layer.mass < previous ||
                    !std::includes(layer.members.begin(), layer.members.end(),
                                   previous_members.begin(), previous_members.end())) {
                    r.fail({{"cube", c.node(q.key)}, {"t", ti}, {"mass", layer.mass},
                            {"previous_mass", previous}});
                }
                if (layer.mass > mu) {
                    r.fail({{"cube", c.node(q.key)}, {"t", ti}, {"mass", layer.mass}, {"cube_measure", mu}});
                }
                previous = layer.mass;
                previous_members = layer.members;
            }
        }
    }
    r.numbers["rows"] = rows;
    r.numbers["t_grid"] = t;
    return r;
}

CheckResult check_decay(const BoundaryFit& fit, Json& constants) {
    CheckResult r("boundary_decay", "mu(layer_t(Q)) <= C2 t^eta mu(Q) with eta > 0 (fitted)");
    r.status = fit.status;
    if (fit.status == CheckStatus::fail) {
        r.violations = 1;
        r.witnesses.push_back({{"eta_emp", *fit.eta}, {"usable_rows", fit.usable}});
    }
    r.note = fit.note;
    r.numbers["usable_rows"] = fit.usable;
    r.numbers["generations"] = fit.generations;
    r.numbers["eta_emp"] = fit.eta ? Json(*fit.eta) : Json(nullptr);
    r.numbers["C2_emp"] = fit.c2 ? Json(*fit.c2) : Json(nullptr);
    Json table = Json::array();
    for (const auto& row : fit.table) {
        table.push_back({row.key.k, row.key.alpha, row.t, row.mass, row.cube_measure, row.used});
    }
    r.numbers["table_columns"] = {"k", "alpha", "t", "mass", "cube_measure", "used"};
    r.numbers["table"] = std::move(table);
    constants["eta_emp"] = fit.eta ? Json(*fit.eta) : Json(nullptr);
    constants["C2_emp"] = fit.c2 ? Json(*fit.c2) : Json(nullptr);
    return r;
}

CheckResult check_measure_ratio(const Context& c, double a1, Json& constants) {
    CheckResult r("parent_child_measure", "mu(Q^{k-1}_b) <= A1^d mu(Q^k_a) for every parent-child pair");
    const auto m = check_parent_child_measure(c.dec, a1);
    r.status = m.status;
    if (m.status == CheckStatus::fail) {
        r.violations = 1;
        r.witnesses.push_back({{"parent", c.node(*m.parent)}, {"child", c.node(*m.child)},
                               {"ratio", m.max_ratio}, {"bound", m.bound}});
    }
    if (m.status == CheckStatus::not_applicable) r.note = "single generation: no parent-child pairs";
    r.numbers["A1"] = m.doubling_constant;
    r.numbers["d"] = m.exponent;
    r.numbers["bound"] = m.bound;
    r.numbers["max_ratio"] = m.max_ratio;
    if (m.parent) {
        r.numbers["argmax_parent"] = c.node(*m.parent);
        r.numbers["argmax_child"] = c.node(*m.child);
    }
    constants["d"] = m.exponent;
    constants["measure_ratio_bound"] = m.bound;
    constants["max_measure_ratio"] = m.max_ratio;
    return r;
}

CheckResult check_top_cube(const Context& c) {
    CheckResult r("top_cube", "bounded X: the coarsest generation has a cube equal to X");
    const auto& top = c.dec.cubes.front();
    bool found = false;
    for (const auto& q : top) {
        if (q.members.size() == c.space.size()) {
            found = true;
            r.numbers["cube"] = c.node(q.key);
        }
    }
    if (!found) {
        std::size_t largest = 0;
        for (const auto& q : top) largest = std::max(largest, q.members.size());
        r.fail({{"k", c.dec.ladder.k_min}, {"largest_cube", largest}, {"points", c.space.size()}});
    }
    return r;
}

} // namespace

std::vector<double> default_t_grid(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
    return {0.5 / delta, 0.25 / delta, 0.125 / delta, 0.0625 / delta};
}

int measure_ratio_exponent(const ConstantLedger& l) {
    const double target = l.quasi_constant / l.scale_ratio * (1.0 + l.diameter_factor);
    int d = 0;
    while (std::ldexp(l.ball_factor, d) < target) ++d;
    return d;
}

MeasureRatio check_parent_child_measure(const Decomposition& dec, double doubling_constant) {
    if (!(doubling_constant >= 1.0)) throw InputError("doubling constant must be >= 1");
    MeasureRatio m;
    m.doubling_constant = doubling_constant;
    m.exponent = measure_ratio_exponent(dec.ledger);
    m.bound = std::pow(doubling_constant, m.exponent);
    for (std::size_t g = 1; g < dec.cubes.size(); ++g) {
        for (const auto& q : dec.cubes[g]) {
            const NodeKey p = dec.tree.parent(q.key);
            const double ratio = dec.cube(p).measure / q.measure;
            if (!m.parent || ratio > m.max_ratio) {
                m.max_ratio = ratio;
                m.parent = p;
                m.child = q.key;
            }
        }
    }
    if (m.parent) m.status = m.max_ratio <= m.bound ? CheckStatus::pass : CheckStatus::fail;
    return m;
}

BoundaryFit fit_boundary_exponent(const Decomposition& dec, std::span<const double> t_grid) {
    require_grid(t_grid);
    BoundaryFit fit;
    const FiniteSpace& space = *dec.space;
    if (dec.ladder.generations() < 2) {
        fit.note = "single generation";
        return fit;
    }
    for (int k = dec.ladder.k_min + 1; k < dec.ladder.k_max; ++k) fit.generations.push_back(k);
    if (fit.generations.empty()) {
        for (int k = dec.ladder.k_min; k <= dec.ladder.k_max; ++k) fit.generations.push_back(k);
    }
    const auto t = ascending(t_grid);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k : fit.generations) {
        for (const auto& q : dec.generation(k)) {
            const auto ext = exterior_distances(dec, q.key);
            const double mu = space.measure(q.members);
            for (double ti : t) {
                const auto layer = boundary_layer(dec, q.key, ti, ext);
                FitRow row{q.key, ti, layer.mass, mu, layer.mass / mu, false};
                if (row.normalized > 0.0 && row.normalized < 1.0) {
                    row.used = true;
                    const double x = std::log(ti), y = std::log(row.normalized);
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    sxy += x * y;
                    ++fit.usable;
                }
                fit.table.push_back(row);
            }
        }
    }
    const double n = static_cast<double>(fit.usable);
    const double var = n * sxx - sx * sx;
    if (fit.usable < 2 || !(var > 0.0)) {
        fit.note = fit.usable < 2 ? "fewer than 2 rows with 0 < m(t) < 1"
                                  : "usable rows share a single t";
        return fit;
    }
    const double slope = (n * sxy - sx * sy) / var;
    const double intercept = (sy - slope * sx) / n;
    fit.eta = slope;
    fit.c2 = std::exp(intercept);
    fit.status = slope > 0.0 ? CheckStatus::pass : CheckStatus::fail;
    fit.note = "least squares over " + std::to_string(fit.usable) + " rows";
    return fit;
}

bool VerificationReport::any_failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const auto& c) { return c.failed(); });
}

const CheckResult* VerificationReport::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

Json VerificationReport::to_json() const {
    std::size_t pass = 0, fail = 0, na = 0;
    Json list = Json::array();
    for (const auto& c : checks) {
        if (c.passed()) ++pass;
        else if (c.failed()) ++fail;
        else ++na;
        list.push_back(c.to_json());
    }
    return {{"summary", {{"passed", pass}, {"failed", fail}, {"not_applicable", na},
                         {"ok", fail == 0}}},
            {"warnings", warnings},
            {"constants", constants},
            {"checks", std::move(list)}};
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    for (const auto& c : checks) {
        std::string status(to_string(c.status));
        for (auto& ch : status) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        os << status << ' ' << c.name;
        if (c.failed()) os << " (" << c.violations << " violations)";
        if (!c.note.empty()) os << " - " << c.note;
        os << '\n';
        for (const auto& w : c.witnesses) os << "  witness " << w.dump() << '\n';
    }
    os << "constants";
    for (const auto& [key, value] : constants.items()) {
        if (value.is_object() || value.is_array()) continue;
        os << ' ' << key << '=' << value.dump();
    }
    os << '\n';
    os << (any_failed() ? "verification FAILED" : "verification ok") << '\n';
    return os.str();
}

const std::vector<std::string>& suite_check_names() {
    static const std::vector<std::string> names = {
        "quasi_triangle",   "net_separation",     "net_maximality",   "order_generation",
        "order_unique_ancestor", "order_parent_close", "order_near_parent", "center_drift",
        "cube_records",     "cube_definition",    "open_cubes",       "inner_ball",
        "outer_ball",       "cube_ancestor",      "disjointness",     "nesting",
        "order_containment", "children_bound",    "coverage",         "strong_inner_ball",
        "boundary_layers",  "boundary_decay",     "parent_child_measure", "top_cube",
        "boundary_measure_zero"};
    return names;
}

VerificationReport run_suite(const Decomposition& dec, const VerifyOptions& options) {
    const Context c(dec);
    VerificationReport report;
    Json empirical = Json::object();
    auto& checks = report.checks;

    checks.push_back(check_quasi_triangle(c, options, empirical));
    auto [sep, max] = check_nets(c);
    checks.push_back(std::move(sep));
    checks.push_back(std::move(max));
    for (auto& r : verify_order(c.space, dec.tree, dec.nets, dec.ledger)) {
        if (r.name == "center_drift") {
            empirical["max_drift_ratio"] = r.numbers["max_ratio"];
        }
        checks.push_back(std::move(r));
    }
    checks.push_back(check_cube_records(c));
    checks.push_back(check_cube_definition(c));

    CheckResult open("open_cubes", "each Q^k_a is open");
    open.not_applicable("discrete: every subset of a finite space is open");
    checks.push_back(std::move(open));

    auto [inner, strong] = check_balls(c, empirical);
    checks.push_back(std::move(inner));
    checks.push_back(check_outer_ball(c));
    checks.push_back(check_cube_ancestor(c));
    checks.push_back(check_disjointness(c));
    auto [nest, order] = check_nesting(c);
    checks.push_back(std::move(nest));
    checks.push_back(std::move(order));
    checks.push_back(check_children(c, empirical));
    checks.push_back(check_coverage(c));
    checks.push_back(std::move(strong));

    const auto grid = options.t_grid.empty() ? default_t_grid(dec.ledger.scale_ratio) : options.t_grid;
    require_grid(grid);
    checks.push_back(check_layers(c, grid));
    checks.push_back(check_decay(fit_boundary_exponent(dec, grid), empirical));

    double a1 = 1.0;
    if (options.doubling_constant) {
        a1 = *options.doubling_constant;
        empirical["A1_source"] = "declared";
    } else {
        const auto est = estimate_doubling(c.space);
        a1 = est.a1_emp;
        empirical["A1_source"] = "estimated";
        empirical["A1_witness"] = {{"point", c.point(est.witness_point)}, {"radius", est.witness_radius}};
    }
    empirical["A1"] = a1;
    checks.push_back(check_measure_ratio(c, a1, empirical));
    checks.push_back(check_top_cube(c));

    CheckResult boundary("boundary_measure_zero", "mu(boundary of Q^k_a) = 0");
    boundary.not_applicable(
        "discrete: the closure of a cube is the cube itself, so its boundary is empty; "
        "same-generation disjointness is checked by 'disjointness'");
    checks.push_back(std::move(boundary));

    Json constants = ledger_json(dec.ledger);
    constants["C6"] = {{"value", dec.ledger.boundary_spread_factor()},
                       {"expression", "A0 (C1 + C4) / (delta C5)"}};
    constants["empirical"] = std::move(empirical);
    report.constants = std::move(constants);

    for (const auto& b : dec.ledger.violated_bounds()) {
        std::ostringstream os;
        os.precision(17);
        os << "relaxed: " << b.parameter << " = " << b.value << " violates " << b.expression
           << " (needed for " << b.role << ")";
        report.warnings.push_back(os.str());
    }
    return report;
}

Json ledger_json(const ConstantLedger& l) {
    auto entry = [](double v, const char* expression) {
        return Json{{"value", v}, {"expression", expression}};
    };
    Json bounds = Json::array();
    for (const auto& b : l.bounds) {
        bounds.push_back({{"parameter", b.parameter}, {"expression", b.expression}, {"role", b.role},
                          {"bound", b.bound}, {"value", b.value}, {"satisfied", b.satisfied}});
    }
    return {{"A0", entry(l.quasi_constant, "declared quasi-triangle constant")},
            {"C1", entry(l.diameter_factor, "A0 + 3 A0^3 + 2 A0^4; diam(Q^k) <= C1 delta^k")},
            {"C3", entry(l.strong_inner_factor, "1/(4 A0^2); B(z^k, C3 delta^k) n X^ inside Q^k")},
            {"C4", entry(l.boundary_cube_factor, "A0^2 (C1 + C5)")},
            {"C5", entry(l.boundary_threshold, "1/(8 A0^4)")},
            {"drift", entry(l.drift_bound, "2 A0; center drift along ancestor chains")},
            {"delta_sup", entry(l.scale_ratio_sup, "minimum of the delta bounds")},
            {"a0_sup", entry(l.ball_factor_sup, "minimum of the a0 bounds")},
            {"delta", entry(l.scale_ratio, "scale ratio between generations")},
            {"a0", entry(l.ball_factor, "ball factor of cube cores")},
            {"relaxed", l.relaxed},
            {"bounds", std::move(bounds)}};
}

std::string ledger_text(const ConstantLedger& l) {
    std::ostringstream os;
    os.precision(17);
    os << "A0        " << l.quasi_constant << '\n'
       << "C1        " << l.diameter_factor << "   A0 + 3 A0^3 + 2 A0^4\n"
       << "C3        " << l.strong_inner_factor << "   1/(4 A0^2)\n"
       << "C4        " << l.boundary_cube_factor << "   A0^2 (C1 + C5)\n"
       << "C5        " << l.boundary_threshold << "   1/(8 A0^4)\n"
       << "C6        " << l.boundary_spread_factor() << "   A0 (C1 + C4) / (delta C5)\n"
       << "drift     " << l.drift_bound << "   2 A0\n"
       << "delta_sup " << l.scale_ratio_sup << '\n'
       << "a0_sup    " << l.ball_factor_sup << '\n'
       << "delta     " << l.scale_ratio << '\n'
       << "a0        " << l.ball_factor << '\n'
       << "relaxed   " << (l.relaxed ? "yes" : "no") << '\n';
    for (const auto& b : l.bounds) {
        os << (b.satisfied ? "  ok   " : "  FAIL ") << b.expression << "  bound " << b.bound
           << "  (" << b.role << ")\n";
    }
    return os.str();
}

} // namespace dyadic
