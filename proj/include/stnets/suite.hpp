#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stnets/index_measure.hpp"
#include "stnets/lattice.hpp"
#include "stnets/nets.hpp"

namespace stnets {

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/// splitmix64. Small, fully pinned, identical on every platform; the suite's
/// byte-identical-report contract depends on it.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, bound), bound >= 1. Multiply-shift reduction.
    std::uint64_t below(std::uint64_t bound);
    /// Rational with numerator in [-max_num, max_num] and denominator in [1, max_den].
    Rational rational(std::uint64_t max_num, std::uint64_t max_den);
    bool coin() { return (next() & 1) != 0; }

private:
    std::uint64_t state_;
};

/// Stable per-trial stream: mixing is associative-free, so trials can run in
/// any order and still see identical randomness.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& label, std::uint64_t trial);

// ---------------------------------------------------------------------------
// Config and results
// ---------------------------------------------------------------------------

struct SuiteConfig {
    std::uint64_t seed = 42;
    std::uint64_t trials = 500;
    std::uint64_t horizon = 512;
    std::vector<RieszSpace> spaces = {RieszSpace::rationals(), RieszSpace::vector(3),
                                      RieszSpace::finsupp()};
    std::vector<std::string> measures = {"periodic-density", "prefix-bounds"};
    bool parallel = true;
    bool include_corrupted_measure_demo = true;
};

struct PropertyFailure {
    std::uint64_t trial = 0;
    std::string input;   // serialized generator output
    std::string verdict; // evidence
};

struct PropertyResult {
    std::string name;
    std::uint64_t trials = 0;
    std::vector<PropertyFailure> failures;
    bool pass() const { return failures.empty(); }
};

/// All property names run_property accepts, sorted.
const std::vector<std::string>& property_names();

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Random element with small exact-rational coordinates.
Element gen_element(SplitMix64& rng, const RieszSpace& space);
/// Random nonnegative, nonzero element.
Element gen_positive_element(SplitMix64& rng, const RieszSpace& space);

struct OrderConvergentSample {
    Net net;
    Element limit;
    Net dominating;
};

/// Net of the shape limit + perturbation below a harmonic/geometric regulator,
/// with its dominating net. Re-verified by check_order_conv before use;
/// generators never vouch for themselves.
OrderConvergentSample gen_order_convergent_net(std::uint64_t seed, const RieszSpace& space);

struct StConvergentSample {
    Net net;
    Element limit;
    Witness witness;
};

/// Order-convergent core plus spikes on a null set the measure can price
/// exactly; the witness avoids the spikes. Re-verified by check_st_order_conv.
StConvergentSample gen_st_convergent_net(std::uint64_t seed, const RieszSpace& space,
                                         const DirectedSetMeasure& mu);

/// Globally decreasing st-convergent net (no spikes), for the monotone bridge.
StConvergentSample gen_monotone_st_net(std::uint64_t seed, const RieszSpace& space,
                                       const DirectedSetMeasure& mu);

// ---------------------------------------------------------------------------
// Property runners
// ---------------------------------------------------------------------------

PropertyResult run_property(const std::string& name, const SuiteConfig& config);

/// PeriodicDensity with a deliberately wrong value on the evens; additivity
/// must fail with a concrete witness pair. Used to check that axioms_check
/// has teeth.
MeasurePtr corrupted_density_measure();

struct C0ExampleReport {
    struct TemplateRejection {
        std::string dominating;
        std::string verdict;
    };
    std::vector<TemplateRejection> order_rejections; // one per template dominating net
    bool order_convergence_rejected = false;
    std::string unboundedness_note;
    std::string exceptional_set;      // serialized, canonical
    bool exceptional_is_odds = false;
    MeasureValue exceptional_density; // under periodic density
    bool st_witness_found_periodic = false;   // template search under periodic density
    bool evens_restriction_zero = false;      // restriction to evens is identically 0
    bool st_accepts_evens_relative = false;   // accepted under the evens-relative measure
    std::string discrepancy_note;
};

/// The interleaved unit-vector example: order-convergence rejections over the
/// whole template family, the exceptional set and its density, and the
/// restriction-vs-measure discrepancy note.
C0ExampleReport c0_example_report(const std::vector<MeasurePtr>& roster);

struct LatticeSelfTest {
    std::uint64_t birkhoff_quadruples = 0;
    std::uint64_t lattice_law_triples = 0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

LatticeSelfTest lattice_self_test(std::uint64_t seed, std::uint64_t quadruples,
                                  const std::vector<RieszSpace>& spaces);

struct MeasureAxiomsSection {
    std::string measure;
    bool pass = false;
    std::uint64_t disjoint_pairs = 0;
    std::uint64_t nested_pairs = 0;
    std::vector<std::string> failures;
};

struct SuiteReport {
    int schema_version = 1;
    SuiteConfig config;
    std::vector<PropertyResult> properties; // sorted by name
    C0ExampleReport c0;
    LatticeSelfTest lattice;
    std::vector<MeasureAxiomsSection> measure_axioms;
    std::optional<std::string> corrupted_measure_witness; // demo failure evidence
    bool vacuous = false; // trials == 0

    bool all_pass() const;
};

/// Every property, the interleaved example, the lattice self-tests and the
/// measure axioms. Deterministic: identical config gives a byte-identical
/// structured report, parallel or not.
SuiteReport run_all(const SuiteConfig& config);

std::string report_to_json(const SuiteReport& r);
std::string report_to_text(const SuiteReport& r);

} // namespace stnets
