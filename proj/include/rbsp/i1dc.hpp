#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rbsp::i1dc {

/// Protocol phase, an integer multiple of pi/4 stored mod 8. Addition and
/// negation never leave the 8-element set.
class Phase {
public:
    Phase() = default;
    explicit Phase(int eighths) : k_(((eighths % 8) + 8) % 8) {}

    int eighths() const { return k_; }
    double radians() const;

    friend Phase operator+(Phase a, Phase b) { return Phase(a.k_ + b.k_); }
    friend Phase operator-(Phase a, Phase b) { return Phase(a.k_ - b.k_); }
    Phase operator-() const { return Phase(-k_); }
    bool operator==(const Phase&) const = default;

private:
    int k_ = 0;
};

struct PureState {
    std::vector<std::complex<double>> amplitudes;

    int qubits() const;
    double norm_squared() const;
};

/// |+_sigma> = (|0> + e^{i sigma} |1>)/sqrt(2)
PureState prepare_plus(Phase sigma);

PureState tensor(const PureState& a, const PureState& b);

struct StepBranch {
    int outcome = 0;
    double probability = 0.0;
    PureState state;  // renormalized single-qubit post-state
};

/// One chain step on a two-qubit state: H on the first qubit, CZ across the
/// pair, then an X-basis measurement of the first qubit. Returns both
/// measurement branches with their Born probabilities.
std::array<StepBranch, 2> step_branches(const PureState& pair_state);

/// Single measurement branch; throws if that branch has zero probability.
StepBranch step(const PureState& pair_state, int outcome);

/// How the phase correction exponents t_l are derived from the outcome
/// string. SuffixParity is the rule realized by the chain,
///   t_l = (s_l + s_{l+1} + ... + s_{k-1}) mod 2,  t_k = 0;
/// PreviousOutcome (t_l = s_{l-1}) is deliberately wrong and exists as a
/// mutation hook for the verifier tests.
enum class ThetaRule { SuffixParity, PreviousOutcome };

Phase theta_from_outcomes(std::span<const Phase> phases,
                          std::span<const int> outcomes,
                          ThetaRule rule = ThetaRule::SuffixParity);

struct Transcript {
    std::vector<Phase> inputs;
    std::vector<int> outcomes;       // size inputs.size() - 1
    PureState output_state;          // single qubit, |+_theta> up to global phase
    Phase theta;                     // from theta_from_outcomes
};

/// Runs the k-qubit chain with forced measurement outcomes (k-1 bits).
Transcript run(std::span<const Phase> phases, std::span<const int> forced_outcomes);

/// Runs the chain sampling outcomes from the Born rule.
Transcript run(std::span<const Phase> phases, std::mt19937_64& rng);

/// |<+_theta|psi>|^2 for a single-qubit state.
double fidelity_with_plus(Phase theta, const PureState& single_qubit);

struct VerifyReport {
    long long cases = 0;
    long long failures = 0;
    double max_fidelity_error = 0.0;    // max over cases of 1 - fidelity
    double max_probability_error = 0.0; // max over steps of |p - 1/2|
    std::vector<std::string> failure_samples;

    bool passed() const { return failures == 0; }
};

/// For `trials` random phase tuples of length `chain_length`, simulates every
/// one of the 2^(k-1) outcome branches and checks that the phase formula
/// matches the state vector (fidelity >= 1 - 1e-10) and that every branch is
/// equiprobable (|p - 1/2| <= 1e-12).
VerifyReport verify(int chain_length, int trials, std::uint64_t seed,
                    ThetaRule rule = ThetaRule::SuffixParity);

}  // namespace rbsp::i1dc
