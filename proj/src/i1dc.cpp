#include "rbsp/i1dc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rbsp::i1dc {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

std::complex<double> phase_factor(Phase p) {
    return std::polar(1.0, p.radians());
}

}  // namespace

double Phase::radians() const { return k_ * std::numbers::pi / 4.0; }

int PureState::qubits() const {
    int n = 0;
    while ((std::size_t{1} << n) < amplitudes.size()) ++n;
    return n;
}

double PureState::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
}

PureState prepare_plus(Phase sigma) {
    return PureState{{kInvSqrt2, kInvSqrt2 * phase_factor(sigma)}};
}

PureState tensor(const PureState& a, const PureState& b) {
    PureState out;
    out.amplitudes.resize(a.amplitudes.size() * b.amplitudes.size());
    std::size_t k = 0;
    for (const auto& x : a.amplitudes)
        for (const auto& y : b.amplitudes) out.amplitudes[k++] = x * y;
    return out;
}

std::array<StepBranch, 2> step_branches(const PureState& pair_state) {
    if (pair_state.amplitudes.size() != 4)
        throw std::domain_error("step_branches: expected a two-qubit state");

    // Amplitude layout: index = 2*b0 + b1 with b0 the measured qubit.
    // H on qubit 0, then CZ.
    std::array<std::complex<double>, 4> amp;
    for (int b1 = 0; b1 < 2; ++b1) {
        const auto& lo = pair_state.amplitudes[b1];      // b0 = 0
        const auto& hi = pair_state.amplitudes[2 + b1];  // b0 = 1
        amp[b1] = kInvSqrt2 * (lo + hi);
        amp[2 + b1] = kInvSqrt2 * (lo - hi);
    }
    amp[3] = -amp[3];  // CZ

    std::array<StepBranch, 2> branches;
    for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        PureState post;
        post.amplitudes = {kInvSqrt2 * (amp[0] + sign * amp[2]),
                           kInvSqrt2 * (amp[1] + sign * amp[3])};
        const double prob = post.norm_squared();
        if (prob > 0.0) {
            const double scale = 1.0 / std::sqrt(prob);
            for (auto& a : post.amplitudes) a *= scale;
        }
        branches[s] = StepBranch{s, prob, std::move(post)};
    }
    return branches;
}

StepBranch step(const PureState& pair_state, int outcome) {
    if (outcome != 0 && outcome != 1)
        throw std::domain_error("step: outcome must be 0 or 1");
    auto branches = step_branches(pair_state);
    if (branches[outcome].probability <= 0.0)
        throw std::domain_error("step: requested branch has zero probability");
    return std::move(branches[outcome]);
}

Phase theta_from_outcomes(std::span<const Phase> phases,
                          std::span<const int> outcomes, ThetaRule rule) {
    if (phases.empty())
        throw std::domain_error("theta_from_outcomes: empty phase list");
    if (outcomes.size() + 1 != phases.size())
        throw std::domain_error("theta_from_outcomes: need one outcome per chain step");

    const std::size_t k = phases.size();
    Phase theta;
    if (rule == ThetaRule::SuffixParity) {
        theta = phases[k - 1];  // t_k = 0
        int parity = 0;
        for (std::size_t l = k - 1; l-- > 0;) {
            parity ^= outcomes[l] & 1;
            theta = theta + (parity ? -phases[l] : phases[l]);
        }
    } else {
        theta = phases[k - 1];
        for (std::size_t l = 0; l + 1 < k; ++l) {
            const int t = l == 0 ? 0 : outcomes[l - 1] & 1;
            theta = theta + (t ? -phases[l] : phases[l]);
        }
    }
    return theta;
}

namespace {

template <typename PickOutcome>
Transcript run_impl(std::span<const Phase> phases, PickOutcome&& pick) {
    if (phases.empty()) throw std::domain_error("run: empty phase list");
    Transcript t;
    t.inputs.assign(phases.begin(), phases.end());
    PureState state = prepare_plus(phases[0]);
    for (std::size_t l = 1; l < phases.size(); ++l) {
        auto branches = step_branches(tensor(state, prepare_plus(phases[l])));
        const int s = pick(l - 1, branches);
        t.outcomes.push_back(s);
        state = std::move(branches[s].state);
    }
    t.output_state = std::move(state);
    t.theta = theta_from_outcomes(t.inputs, t.outcomes);
    return t;
}

}  // namespace

Transcript run(std::span<const Phase> phases, std::span<const int> forced_outcomes) {
    if (forced_outcomes.size() + 1 != phases.size())
        throw std::domain_error("run: need one forced outcome per chain step");
    return run_impl(phases, [&](std::size_t i, const std::array<StepBranch, 2>& branches) {
        const int s = forced_outcomes[i] & 1;
        if (branches[s].probability <= 0.0)
            throw std::domain_error("run: forced branch has zero probability");
        return s;
    });
}

Transcript run(std::span<const Phase> phases, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return run_impl(phases, [&](std::size_t, const std::array<StepBranch, 2>& branches) {
        return unit(rng) < branches[0].probability ? 0 : 1;
    });
}

double fidelity_with_plus(Phase theta, const PureState& single_qubit) {
    if (single_qubit.amplitudes.size() != 2)
        throw std::domain_error("fidelity_with_plus: expected a single-qubit state");
    const std::complex<double> overlap =
        kInvSqrt2 * (single_qubit.amplitudes[0] +
                     std::conj(phase_factor(theta)) * single_qubit.amplitudes[1]);
    return std::norm(overlap);
}

VerifyReport verify(int chain_length, int trials, std::uint64_t seed, ThetaRule rule) {
    if (chain_length < 1 || chain_length > 14)
        throw std::domain_error("verify: chain length must lie in [1,14]");
    if (trials < 1) throw std::domain_error("verify: need at least one trial");

    constexpr double kFidelityTol = 1e-10;
    constexpr double kProbabilityTol = 1e-12;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> random_phase(0, 7);

    VerifyReport report;
    const long long branch_count = 1LL << (chain_length - 1);
    std::vector<Phase> phases(chain_length);
    std::vector<int> outcomes(chain_length - 1);

    for (int trial = 0; trial < trials; ++trial) {
        for (auto& p : phases) p = Phase(random_phase(rng));
        for (long long bits = 0; bits < branch_count; ++bits) {
            for (int i = 0; i < chain_length - 1; ++i)
                outcomes[i] = static_cast<int>((bits >> i) & 1);

            // Re-simulate the branch while checking every step probability.
            PureState state = prepare_plus(phases[0]);
            double worst_prob_err = 0.0;
            for (int l = 1; l < chain_length; ++l) {
                auto branches = step_branches(tensor(state, prepare_plus(phases[l])));
                worst_prob_err = std::max(
                    worst_prob_err, std::abs(branches[0].probability - 0.5));
                worst_prob_err = std::max(
                    worst_prob_err, std::abs(branches[1].probability - 0.5));
                state = std::move(branches[outcomes[l - 1]].state);
            }
            const Phase theta = theta_from_outcomes(phases, outcomes, rule);
            const double fidelity = fidelity_with_plus(theta, state);

            ++report.cases;
            report.max_fidelity_error = std::max(report.max_fidelity_error, 1.0 - fidelity);
            report.max_probability_error = std::max(report.max_probability_error, worst_prob_err);
            if (fidelity < 1.0 - kFidelityTol || worst_prob_err > kProbabilityTol) {
                ++report.failures;
                if (report.failure_samples.size() < 8) {
                    std::string desc = "k=" + std::to_string(chain_length) + " phases=";
                    for (const auto& p : phases) desc += std::to_string(p.eighths());
                    desc += " outcomes=";
                    for (int s : outcomes) desc += std::to_string(s);
                    desc += " fidelity=" + std::to_string(fidelity);
                    report.failure_samples.push_back(std::move(desc));
                }
            }
        }
    }
    return report;
}

}  // namespace rbsp::i1dc
