#pragma once

// The inventory of separable potentials with third-order integrals: 21 quantum entries
// (Q.1-Q.21) and 8 classical ones (C.1-C.8), each with its parameter schema, potential
// builder and every listed integral in the canonical anticommutator form.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sepint/errors.hpp"
#include "sepint/phasecore.hpp"
#include "sepint/specfun.hpp"

namespace sepint::catalog {

class NoLimitError : public Error {
 public:
  using Error::Error;
};

enum class Constraint { any, nonzero, positive, nonnegative, sign };

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
  Constraint constraint = Constraint::any;
  std::string doc;
};

/// Axis-aligned rectangle in the (x, y) plane.
struct Box {
  Interval x;
  Interval y;
};

/// Ranges from which regular initial phase states are drawn.
struct StateBox {
  Interval x, y, px, py;
};

struct InstantiateOptions {
  /// Region where the potential must be valid; defaults to the entry's domain.
  std::optional<Box> working_domain;
  /// The free component V(x) of Q.15; defaults to x^2.
  std::optional<Potential1D> free_component;
  /// Overrides the entry's canonical initial condition for its special function.
  std::optional<specfun::PainleveIC> ic;
};

/// Seed of a numerically traced root branch: every real root at the seed abscissa and the one continued.
struct BranchSeed {
  std::string relation;
  double x0 = 0.0;
  std::vector<double> roots;
  double chosen = 0.0;
  /// Range handed to the continuation.
  Interval range;
  double step = 0.0;
};

using IntegralBuilder = std::function<ThirdOrderIntegral(const ParamSet&, const SeparablePotential&)>;

struct IntegralEntry {
  /// Leading-order terms, in the notation of Table 1.
  std::string label;
  /// g1 and g2 as text, for the reference document.
  std::string g1_text;
  std::string g2_text;
  IntegralBuilder build;
  /// For as-printed variants: why they differ from the stored integral.
  std::string erratum;
};

struct LimitLink {
  std::string target;
  std::string condition;  // when this link applies, in words
  std::string mapping;    // parameter mapping, in words
  std::function<bool(const ParamSet&)> applies;
  std::function<ParamSet(const ParamSet&)> map;
};

struct PotentialEntry {
  std::string id;
  std::string table1_label;  // Va..Vo, or empty
  /// Leading-order terms of the Table 1 row, one string per integral.
  std::vector<std::string> table1_terms;
  bool quantum = true;
  /// Built from a special function (Weierstrass or Painleve).
  bool special_function = false;
  /// Built from a numerically traced implicit root branch.
  bool branch_built = false;
  bool requires_hbar_positive = false;
  std::vector<ParamSpec> schema;
  /// Fills parameters whose defaults depend on others, and checks cross-parameter rules.
  std::function<void(ParamSet&)> complete;
  std::string potential_text;
  std::function<SeparablePotential(const ParamSet&, const InstantiateOptions&, const Box&)> build;
  /// Branch-built entries: the seed used for the working box.
  std::function<BranchSeed(const ParamSet&, const Box&)> seed_scan;
  std::vector<IntegralEntry> integrals;
  /// Integrals exactly as printed where the printed form fails the determining equations.
  std::vector<IntegralEntry> printed_variants;
  Box domain;
  StateBox states;
  std::string canonical_ic;
  std::vector<LimitLink> limits;
  std::vector<std::string> notes;
};

const std::vector<PotentialEntry>& entries();
/// Throws UnknownEntryError.
const PotentialEntry& find_entry(const std::string& id);

struct EntrySummary {
  std::string id;
  std::string table1_label;
  std::vector<ParamSpec> schema;
  std::size_t integral_count = 0;
  std::vector<std::string> leading_terms;
};

std::vector<EntrySummary> list_entries();

/// Applies defaults and checks the schema; throws SchemaError.
ParamSet resolve_params(const PotentialEntry& entry, const ParamSet& overrides);

struct Instance {
  std::string id;
  ParamSet params;
  SeparablePotential potential;
  std::vector<ThirdOrderIntegral> integrals;
  Box domain;
};

Instance instantiate(const std::string& id, const ParamSet& params, const InstantiateOptions& options = {});

/// The as-printed variants of an entry's integrals, built against its potential.
std::vector<ThirdOrderIntegral> instantiate_printed_variants(const Instance& instance);

/// Target entry and mapped parameters of the first applicable limit link.
std::pair<std::string, ParamSet> classical_limit(const std::string& id, const ParamSet& params);

/// Monomial slots (indices into CoeffTensor::as_array) named in a Table 1 label.
std::vector<std::size_t> label_terms(const std::string& label);
/// Nonzero slots of a coefficient tensor.
std::vector<std::size_t> nonzero_terms(const CoeffTensor& A);

/// Markdown reference document: one section per entry.
void write_reference(std::ostream& os);

}  // namespace sepint::catalog
