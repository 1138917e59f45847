#include <riskbound/errors.hpp>
#include <riskbound/pomdp.hpp>

#include <cmath>
#include <string>

namespace riskbound {

namespace {

constexpr double row_tol = 1e-9;
constexpr double belief_match_tol = 1e-9;
constexpr double min_branch_prob = 1e-300;

void check_stochastic_rows(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
    if (m.size() != rows) throw InvalidArgument(what + ": wrong number of rows");
    for (const auto& r : m) {
        if (r.size() != cols) throw InvalidArgument(what + ": wrong row length");
        double s = 0.0;
        for (double p : r) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument(what + ": entries must be non-negative");
            s += p;
        }
        if (std::abs(s - 1.0) > row_tol) throw InvalidArgument(what + ": rows must sum to one");
    }
}

void check_transition(const Tensor3& t, std::size_t na, std::size_t ns, const std::string& what) {
    if (t.size() != na) throw InvalidArgument(what + ": one matrix per action expected");
    for (const auto& m : t) check_stochastic_rows(m, ns, ns, what);
}

bool same_belief(const Belief& a, const Belief& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > belief_match_tol) return false;
    return true;
}

// Successor-belief atoms with equal beliefs merged.
std::vector<BeliefTransitionAtom> merged_step(const SimplifiedPair& pair, const Belief& b, int a, ModelKind m) {
    std::vector<BeliefTransitionAtom> out;
    for (auto& atom : belief_mdp_step(pair, b, a, m)) {
        bool merged = false;
        for (auto& o : out) {
            if (same_belief(o.belief, atom.belief)) {
                o.prob += atom.prob;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(std::move(atom));
    }
    return out;
}

std::vector<double> predict(const SimplifiedPair& pair, const Belief& b, int a, ModelKind m) {
    const auto& T = pair.transition(m)[static_cast<std::size_t>(a)];
    const std::size_t n = b.size();
    std::vector<double> pred(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        if (b[x] == 0.0) continue;
        for (std::size_t y = 0; y < n; ++y) pred[y] += T[x][y] * b[x];
    }
    return pred;
}

void check_action(const SimplifiedPair& pair, int a) {
    if (a < 0 || static_cast<std::size_t>(a) >= pair.original.n_actions())
        throw InvalidArgument("action index out of range: " + std::to_string(a));
}

} // namespace

void FinitePomdp::validate() const {
    const std::size_t ns = n_states(), na = n_actions(), no = n_observations();
    if (ns == 0 || na == 0 || no == 0) throw InvalidArgument("model needs states, actions and observations");
    check_transition(transition, na, ns, "transition");
    check_stochastic_rows(observation, ns, no, "observation");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("r_max must be positive");
    if (cost.size() != ns) throw InvalidArgument("cost: one row per state expected");
    for (const auto& r : cost) {
        if (r.size() != na) throw InvalidArgument("cost: one entry per action expected");
        for (double c : r)
            if (!std::isfinite(c) || std::abs(c) > r_max) throw InvalidArgument("cost must lie in [-r_max, r_max]");
    }
}

void SimplifiedPair::validate() const {
    original.validate();
    check_transition(simplified_transition, original.n_actions(), original.n_states(), "simplified_transition");
    check_stochastic_rows(simplified_observation, original.n_states(), original.n_observations(),
                          "simplified_observation");
    if (start_k < 0 || horizon_T < start_k) throw InvalidArgument("need 0 <= start_k <= horizon_T");
    check_belief(*this, b0);
}

int Policy::action(int t, const Belief& b) const {
    if (t < start || t - start >= static_cast<int>(table.size()))
        throw InvalidArgument("policy has no entry for time step " + std::to_string(t));
    return table[static_cast<std::size_t>(t - start)][argmax_state(b)];
}

void Policy::validate(const SimplifiedPair& pair) const {
    if (start > pair.start_k || start + static_cast<int>(table.size()) <= pair.horizon_T)
        throw InvalidArgument("policy must cover time steps start_k..horizon_T");
    for (const auto& row : table) {
        if (row.size() != pair.n_states()) throw InvalidArgument("policy row needs one action per state");
        for (int a : row) check_action(pair, a);
    }
}

std::size_t argmax_state(const std::vector<double>& w) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] > w[best]) best = i;
    return best;
}

void check_belief(const SimplifiedPair& pair, const Belief& b) {
    if (b.size() != pair.n_states()) throw InvalidArgument("belief has wrong dimension");
    double s = 0.0;
    for (double p : b) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("belief entries must be non-negative");
        s += p;
    }
    if (std::abs(s - 1.0) > row_tol) throw InvalidArgument("belief must sum to one");
}

Belief belief_update(const SimplifiedPair& pair, const Belief& b, int a, int z, ModelKind model) {
    check_action(pair, a);
    if (z < 0 || static_cast<std::size_t>(z) >= pair.original.n_observations())
        throw InvalidArgument("observation index out of range");
    const auto& O = pair.observation(model);
    auto post = predict(pair, b, a, model);
    double norm = 0.0;
    for (std::size_t x = 0; x < post.size(); ++x) {
        post[x] *= O[x][static_cast<std::size_t>(z)];
        norm += post[x];
    }
    if (norm <= min_branch_prob) throw ImpossibleObservation("observation has zero probability under the belief");
    for (double& p : post) p /= norm;
    return post;
}

std::vector<BeliefTransitionAtom> belief_mdp_step(const SimplifiedPair& pair, const Belief& b, int a, ModelKind model) {
    check_action(pair, a);
    const auto& O = pair.observation(model);
    const auto pred = predict(pair, b, a, model);
    const std::size_t n = pred.size();
    std::vector<BeliefTransitionAtom> out;
    double total = 0.0;
    for (std::size_t z = 0; z < pair.original.n_observations(); ++z) {
        Belief post(n);
        double pz = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            post[x] = O[x][z] * pred[x];
            pz += post[x];
        }
        if (pz <= min_branch_prob) continue;
        for (double& p : post) p /= pz;
        out.push_back({std::move(post), pz, static_cast<int>(z)});
        total += pz;
    }
    // absorb row-sum rounding so that atom masses sum to one
    for (auto& atom : out) atom.prob /= total;
    return out;
}

double tv_distance(const SimplifiedPair& pair, const Belief& b, int a) {
    auto p = merged_step(pair, b, a, ModelKind::Original);
    auto q = merged_step(pair, b, a, ModelKind::Simplified);
    std::vector<bool> used(q.size(), false);
    double d = 0.0;
    for (const auto& atom : p) {
        double other = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            if (!used[j] && same_belief(atom.belief, q[j].belief)) {
                other = q[j].prob;
                used[j] = true;
                break;
            }
        }
        d += std::abs(atom.prob - other);
    }
    for (std::size_t j = 0; j < q.size(); ++j)
        if (!used[j]) d += q[j].prob;
    return d;
}

double belief_cost(const SimplifiedPair& pair, const Belief& b, int a) {
    check_action(pair, a);
    double c = 0.0;
    for (std::size_t x = 0; x < b.size(); ++x) c += b[x] * pair.original.cost[x][static_cast<std::size_t>(a)];
    return c;
}

} // namespace riskbound
