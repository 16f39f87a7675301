#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bi/semantics.hpp"

namespace bi {

/// Non-blocking reads an operation as a contract (anything may happen
/// outside its precondition); blocking reads it as a guard.
enum class CheckMode { NonBlocking, Blocking };

struct CheckConfig {
  CheckMode mode = CheckMode::NonBlocking;
  bool relax_virtual_ops = false;       // extra ops simulated by calculated virtual ops
  bool relax_abstract_classes = false;  // applicability lifted under abstract parents
  std::uint64_t state_cap = kDefaultStateCap;
};

enum class ObligationKind {
  Initialisation,
  Applicability,
  CorrectnessNB,
  CorrectnessB,
  Finalisation,
  SkipApplicability,
  SkipCorrectness,
  VirtualOpTheorem,
};

const char* obligation_kind_name(ObligationKind kind);

/// Stable rule tag used in reports, e.g. "rule 2" for applicability.
const char* rule_tag(ObligationKind kind);

enum class Verdict { Holds, Fails, Lifted, AcceptedByRelaxation };

const char* verdict_name(Verdict v);

struct Obligation {
  ObligationKind kind;
  std::string subclass;
  std::string superclass;
  std::optional<std::string> op;      // present iff the kind concerns an operation
  std::optional<std::string> aspect;  // VirtualOpTheorem: "applicability"/"correctness"
};

/// A binding rendered self-contained for reports: (name, value) pairs in
/// signature order.
struct NamedBinding {
  std::vector<std::pair<std::string, Value>> entries;
  std::string str() const;
};

NamedBinding name_binding(const FieldSig& sig, const Binding& b);

struct Witness {
  std::optional<NamedBinding> state;       // C
  std::optional<NamedBinding> post_state;  // C'
  std::optional<NamedBinding> input;       // i?
  std::optional<NamedBinding> output;      // o!
};

struct Finding {
  Obligation obligation;
  Verdict verdict = Verdict::Holds;
  std::optional<Witness> witness;  // present iff verdict == Fails
  std::string note;
};

enum class OverallVerdict { Conformant, NonConformant };

struct EdgeReport {
  std::string subclass;
  std::string superclass;
  std::vector<Finding> findings;
};

struct CheckReport {
  std::vector<EdgeReport> edges;
  OverallVerdict overall = OverallVerdict::Conformant;
};

/* ---- individual obligations ---------------------------------------------- */

/// Rule 1: every init state of the subclass projects onto an init state of
/// the superclass.
Finding check_initialisation(Workspace& ws, const std::string& sub,
                             const std::string& super);

/// Rule 2: wherever the superclass operation is enabled (seen through the
/// projection), the subclass operation is enabled too. Lifted when the
/// superclass is abstract and that relaxation is on.
Finding check_applicability(Workspace& ws, const std::string& sub,
                            const std::string& super, const std::string& op,
                            const CheckConfig& config);

/// Rule 3 (non-blocking) or 3a (blocking): every subclass transition,
/// viewed through the projection, is permitted by the superclass operation;
/// non-blocking restricts attention to states where the superclass
/// operation is enabled.
Finding check_correctness(Workspace& ws, const std::string& sub,
                          const std::string& super, const std::string& op,
                          CheckMode mode);

/// Rule 4: the subclass finalisation condition implies the superclass one.
Finding check_finalisation(Workspace& ws, const std::string& sub,
                           const std::string& super);

/// Obligations for a subclass-extra operation. Strict: checked against a
/// skip that leaves the inherited state unchanged (any input, any output).
/// Relaxed: accepted outright, with the calculated virtual operation
/// (the projection image of the extra operation) checked as a diagnostic.
std::vector<Finding> check_extra_op(Workspace& ws, const std::string& sub,
                                    const std::string& super, const OperationSpec& op,
                                    const CheckConfig& config);

/* ---- aggregation ---------------------------------------------------------- */

/// All obligations of one subclassing edge (sub against its direct parent),
/// in deterministic (kind, op, aspect) order.
std::vector<Finding> check_edge(Workspace& ws, const std::string& sub,
                                const CheckConfig& config);

/// Folds check_edge over every parent edge in declaration order. The
/// workspace must have been built with config.state_cap.
CheckReport check_hierarchy(Workspace& ws, const CheckConfig& config);

/* ---- self-checking -------------------------------------------------------- */

/// Re-derives a Fails finding from first principles: fresh enumeration plus
/// eval, independent of the cached relation tables. True iff the witness
/// genuinely exhibits the violation.
bool witness_reproduces(const Hierarchy& h, const Finding& f,
                        std::uint64_t cap = kDefaultStateCap);

}  // namespace bi
