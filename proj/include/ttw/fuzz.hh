#ifndef TTW_FUZZ_HH
#define TTW_FUZZ_HH

#include <cstdint>
#include <random>
#include <string>

#include "ttw/mtt.hh"
#include "ttw/sst.hh"
#include "ttw/tdtt.hh"

namespace ttw {

/// Deterministic RNG wrapper. Bounded sampling avoids
/// std::uniform_int_distribution, whose output is implementation-defined;
/// reports must be byte-identical for a fixed seed everywhere.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    size_t below(size_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return static_cast<size_t>(r % n);
    }

    bool chance(double p) { return below(1u << 20) < static_cast<size_t>(p * (1u << 20)); }

  private:
    std::mt19937_64 engine_;
};

uint64_t child_seed(uint64_t master, uint64_t index);

struct ModelShape {
    bool with_lookahead = false;
    bool string_output = false;
    bool unary_input = false;   // tdtt only
    bool unary_output = false;  // mtt only
};

/// Random well-formed deterministic models over fixed alphabets. Every
/// (state, letter, lookahead vector) receives a rule with probability
/// `present_p`; bodies are drawn by bounded random descent of depth <= 3.
TopDownTT random_tdtt(Rng& rng, const ModelShape& shape, double present_p = 0.9);
MacroTT random_mtt(Rng& rng, const ModelShape& shape, double present_p = 0.9);
Sst random_sst(Rng& rng);
Tree random_tree(Rng& rng, const RankedAlphabet& alphabet, size_t max_nodes);

struct FuzzOptions {
    std::string kind = "tdtt";  // tdtt | mtt | sst
    uint64_t seed = 0;
    size_t count = 10;      // retained (checked) models
    size_t max_size = 6;    // differential bound: tree nodes / string length
    size_t random_tree_checks = 0;   // extra random inputs per model (mtt)
    size_t random_tree_size = 30;
    EvalLimits limits{200'000};
};

struct FuzzResult {
    std::string report;  // deterministic, line-oriented
    size_t models = 0;
    size_t ok = 0;
    size_t skipped = 0;    // resource budget hit; model not counted as checked
    size_t failures = 0;
    size_t rejected = 0;   // generated but not well-formed
};

/// Generates models, applies every applicable conversion and compares the
/// results on all inputs within the bound (values and definedness). Budget
/// overruns skip the model; mismatches are failures with the model's
/// definition and the counterexample in the report.
FuzzResult fuzz(const FuzzOptions& options);

}  // namespace ttw

#endif  // TTW_FUZZ_HH
