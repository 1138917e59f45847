#include <riskbound/errors.hpp>
#include <riskbound/parallel.hpp>
#include <riskbound/particle.hpp>
#include <riskbound/risk.hpp>

#include <algorithm>

namespace riskbound {

namespace {

constexpr std::uint64_t rollout_tag = 1;
constexpr int max_redraws = 1000;

std::vector<double> cumulative(const std::vector<double>& row) {
    std::vector<double> c(row.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        acc += row[i];
        c[i] = acc;
    }
    return c;
}

int sample_cdf(const std::vector<double>& cdf, Rng& rng) {
    const double u = uniform01(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        // u rounded up to the total: take the last entry with positive mass
        --it;
        while (it != cdf.begin() && *it == *(it - 1)) --it;
    }
    return static_cast<int>(it - cdf.begin());
}

} // namespace

void RolloutConfig::validate() const {
    if (num_rollouts_C < 1) throw InvalidArgument("need at least one rollout");
    if (num_particles_Nx < 1) throw InvalidArgument("need at least one particle");
}

ParticleBelief ParticleBelief::from_belief(const Belief& b, std::size_t n_x) {
    if (n_x < 1) throw InvalidArgument("need at least one particle");
    std::vector<int> support;
    for (std::size_t x = 0; x < b.size(); ++x)
        if (b[x] > 0.0) support.push_back(static_cast<int>(x));
    if (support.empty()) throw InvalidArgument("belief has no support");
    std::vector<std::size_t> count(b.size(), 0);
    ParticleBelief out;
    out.particles.reserve(n_x);
    for (std::size_t j = 0; j < n_x; ++j) {
        const int x = support[j % support.size()];
        ++count[static_cast<std::size_t>(x)];
        out.particles.push_back({x, 0.0});
    }
    for (auto& p : out.particles) {
        const auto ux = static_cast<std::size_t>(p.state);
        p.weight = b[ux] / static_cast<double>(count[ux]);
    }
    return out;
}

std::vector<double> ParticleBelief::histogram(std::size_t n_states) const {
    std::vector<double> h(n_states, 0.0);
    double total = 0.0;
    for (const auto& p : particles) {
        h[static_cast<std::size_t>(p.state)] += p.weight;
        total += p.weight;
    }
    for (double& v : h) v /= total;
    return h;
}

void ParticleBelief::validate() const {
    bool positive = false;
    for (const auto& p : particles) {
        if (!(p.weight >= 0.0)) throw InvalidArgument("particle weights must be non-negative");
        positive = positive || p.weight > 0.0;
    }
    if (!positive) throw InvalidArgument("particle belief needs a positive weight");
}

GenerativeModel::GenerativeModel(const SimplifiedPair& pair, ModelKind model)
    : pair_(pair), observation_(pair.observation(model)) {
    for (const auto& per_action : pair.transition(model)) {
        std::vector<std::vector<double>> rows;
        for (const auto& row : per_action) rows.push_back(cumulative(row));
        transition_cdf_.push_back(std::move(rows));
    }
    for (const auto& row : observation_) observation_cdf_.push_back(cumulative(row));
}

int GenerativeModel::next_state(int x, int a, Rng& rng) const {
    return sample_cdf(transition_cdf_[static_cast<std::size_t>(a)][static_cast<std::size_t>(x)], rng);
}

int GenerativeModel::observe(int x_next, Rng& rng) const {
    return sample_cdf(observation_cdf_[static_cast<std::size_t>(x_next)], rng);
}

std::pair<ParticleBelief, double> genpf(const GenerativeModel& model, const ParticleBelief& b, int a, Rng& rng) {
    const auto& ps = b.particles;
    double total = 0.0;
    for (const auto& p : ps) total += p.weight;
    if (!(total > 0.0)) throw DegenerateWeights("particle belief has no positive weight");

    // state drawn by normalised weight
    double u = uniform01(rng) * total;
    std::size_t j = 0;
    for (; j + 1 < ps.size(); ++j) {
        if (u < ps[j].weight) break;
        u -= ps[j].weight;
    }
    const int x0_next = model.next_state(ps[j].state, a, rng);
    const int z = model.observe(x0_next, rng);

    ParticleBelief out;
    out.particles.reserve(ps.size());
    double rho = 0.0, new_total = 0.0;
    for (const auto& p : ps) {
        const int xn = model.next_state(p.state, a, rng);
        const double w = p.weight * model.likelihood(xn, z);
        rho += p.weight * model.cost(p.state, a);
        new_total += w;
        out.particles.push_back({xn, w});
    }
    if (!(new_total > 1e-300)) throw DegenerateWeights("all particle weights vanished after the update");
    for (auto& p : out.particles) p.weight /= new_total;
    return {std::move(out), rho / total};
}

double sample_return(const GenerativeModel& model, const Policy& policy, const ParticleBelief& b, int a, int t,
                     int depth, Rng& rng) {
    if (depth < 0) throw InvalidArgument("depth must be non-negative");
    double ret = 0.0;
    ParticleBelief cur = b;
    const std::size_t n = model.pair().n_states();
    for (int d = depth; d > 0; --d) {
        auto [next, rho] = genpf(model, cur, a, rng);
        ret += rho;
        cur = std::move(next);
        ++t;
        if (d > 1) a = policy.action(t, cur.histogram(n));
    }
    return ret;
}

std::vector<double> simulate_returns(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                     ModelKind model, const RolloutConfig& config, int workers) {
    config.validate();
    check_belief(pair, query.belief);
    const GenerativeModel gen(pair, model);
    const auto b0 = ParticleBelief::from_belief(query.belief, config.num_particles_Nx);
    const int a0 = query.action ? *query.action : policy.action(query.k, b0.histogram(pair.n_states()));
    const int depth = pair.horizon_T - query.k + 1;
    std::vector<double> out(config.num_rollouts_C);
    parallel_for(out.size(), workers, [&](std::size_t i) {
        Rng rng = make_stream(config.rng_seed, rollout_tag, i);
        for (int attempt = 0;; ++attempt) {
            try {
                out[i] = sample_return(gen, policy, b0, a0, query.k, depth, rng);
                return;
            } catch (const DegenerateWeights&) {
                if (attempt + 1 >= max_redraws) throw;
            }
        }
    });
    return out;
}

double estimate_q(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query, double alpha,
                  const RolloutConfig& config, ModelKind model, int workers) {
    return cvar_estimate_sorted(simulate_returns(pair, policy, query, model, config, workers), alpha);
}

} // namespace riskbound
