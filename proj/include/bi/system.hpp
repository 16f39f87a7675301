#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bi/refinement.hpp"
#include "bi/semantics.hpp"

namespace bi {

struct SystemError : std::runtime_error {
  enum class Kind {
    UnknownObject,
    UnknownOperation,
    UnknownClass,
    PoolExhausted,
    InvalidEvent,
  };
  Kind kind;
  SystemError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct DepthTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ObjectId = std::uint32_t;

std::string object_name(ObjectId id);  // "o1", "o2", ...

constexpr std::uint32_t kDefaultPoolSize = 4;

/* -------------------------------------------------------------------------- */
/* System state                                                                */
/* -------------------------------------------------------------------------- */

/// Object populations: each existing object carries its direct class and a
/// local state of that class. Superclass views are projections, so the
/// consistency between a subclass object and its superclass view holds by
/// construction, and direct extensions are disjoint by keying on the id.
struct SystemState {
  std::uint32_t pool_size = kDefaultPoolSize;
  std::map<ObjectId, std::pair<std::string, Binding>> objects;

  bool exists(ObjectId id) const { return objects.count(id) != 0; }

  /// Derived extension: objects whose direct class is `cls` or a descendant.
  std::vector<ObjectId> extension(const Hierarchy& h, const std::string& cls) const;

  std::optional<ObjectId> first_free() const;
};

/// Invariant audit used by tests and debugging: every object names a known
/// non-abstract class, lies inside the id pool, and its local state
/// satisfies the class's effective invariant.
std::vector<std::string> system_invariant_violations(Workspace& ws,
                                                     const SystemState& sys);

/* -------------------------------------------------------------------------- */
/* Events and stepping                                                         */
/* -------------------------------------------------------------------------- */

struct SystemEvent {
  enum class Kind { New, Delete, Call };

  Kind kind = Kind::Call;
  ObjectId object = 0;
  std::string class_name;  // New
  std::string op;          // Call
  Binding input;           // Call, aligned with the operation's input signature

  static SystemEvent make_new(std::string cls, ObjectId id);
  static SystemEvent make_delete(ObjectId id);
  static SystemEvent make_call(ObjectId id, std::string op, Binding input = {});
};

enum class StepStatus { Ok, Blocked, ContractViolated };

struct StepResult {
  StepStatus status = StepStatus::Ok;
  SystemState state;   // the successor when Ok, otherwise the input state
  std::string detail;  // why a step blocked or violated its contract
};

/// One promoted step. Calls dispatch on the object's direct class. Global
/// constraints act as guards: a call on an object is enabled only when the
/// object's current state satisfies every constraint attached to a class
/// whose extension contains it. A disabled call Blocks in blocking mode; in
/// non-blocking mode it is reported as ContractViolated (the contract
/// permits any outcome, which the simulator reports rather than invents).
StepResult step(Workspace& ws, const SystemState& sys, const SystemEvent& ev,
                CheckMode mode);

/* -------------------------------------------------------------------------- */
/* Freeness lint                                                               */
/* -------------------------------------------------------------------------- */

enum class LintSeverity { Warning, Error };

struct LintFinding {
  std::string class_name;
  LintSeverity severity = LintSeverity::Warning;
  std::string message;
  ExprPtr constraint;
};

/// Flags every global constraint attached to a class that has ancestors;
/// constraints on root classes are compositionality-safe and not flagged.
/// In strict mode a constraint below a non-abstract proper ancestor is an
/// Error; the default keeps everything a Warning.
std::vector<LintFinding> lint_freeness(const Hierarchy& h, bool strict = false);

/* -------------------------------------------------------------------------- */
/* Bounded substitutability comparison                                         */
/* -------------------------------------------------------------------------- */

enum class DivergenceReason { EnablednessMismatch, OutputMismatch };

const char* divergence_reason_name(DivergenceReason r);

/// An object-generic call template: operation plus a concrete input binding.
struct EventTemplate {
  std::string op;
  NamedBinding input;

  std::string str() const;  // "join(item? = a)" or "leave()"
};

struct TraceDivergence {
  std::vector<EventTemplate> trace;
  std::size_t step = 0;  // 0-based index into trace; displayed 1-based
  DivergenceReason reason = DivergenceReason::EnablednessMismatch;
  std::string detail;
  std::vector<std::string> transcript_a;  // "step k: call EV -> enabled|blocked|violated"
  std::vector<std::string> transcript_b;
};

struct ComparisonResult {
  std::string class_a;
  std::string class_b;
  std::uint32_t depth = 0;
  std::optional<TraceDivergence> divergence;  // nullopt means no divergence found

  bool no_divergence() const { return !divergence.has_value(); }
};

/// Breadth-first comparison of a fresh object of each class over the
/// operation alphabet of class_a (or of the nearest common ancestor when
/// class_a is not an ancestor of class_b). All nondeterminism -- initial
/// states and operation outcomes -- is tracked set-valued, and the first
/// divergence in (depth, template order) is reported. Both classes must be
/// non-abstract.
ComparisonResult compare_substitutability(Workspace& ws, const std::string& class_a,
                                          const std::string& class_b,
                                          std::uint32_t depth, CheckMode mode,
                                          std::uint32_t max_depth = 6);

}  // namespace bi
