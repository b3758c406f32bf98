#pragma once

#include <stdexcept>
#include <string>

namespace bcpar {

/// Base of every error the library raises. `kind()` is a stable tag used by
/// the CLI for exit-code mapping and by tests.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define BCPAR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

// classfile
BCPAR_DEFINE_ERROR(MalformedClassfile)
BCPAR_DEFINE_ERROR(UnsupportedVersion)
BCPAR_DEFINE_ERROR(InconsistentModel)
BCPAR_DEFINE_ERROR(NoSuchMethod)
BCPAR_DEFINE_ERROR(AbstractMethod)

// decompile
BCPAR_DEFINE_ERROR(NonEmptyStackAtBoundary)
BCPAR_DEFINE_ERROR(UnsupportedOpcode)
BCPAR_DEFINE_ERROR(StackUnderflow)

// loopx
BCPAR_DEFINE_ERROR(IrregularControlFlow)
BCPAR_DEFINE_ERROR(NonCanonicalLoop)

// xform / parcodegen
BCPAR_DEFINE_ERROR(IllegalTransform)
BCPAR_DEFINE_ERROR(CaptureFailure)
BCPAR_DEFINE_ERROR(UnsupportedReduction)

// autotune / backends
BCPAR_DEFINE_ERROR(NoCandidates)
BCPAR_DEFINE_ERROR(BackendUnavailable)
BCPAR_DEFINE_ERROR(MeasurementFailure)

// metrics
BCPAR_DEFINE_ERROR(NonPositiveTime)
BCPAR_DEFINE_ERROR(EmptyInput)

#undef BCPAR_DEFINE_ERROR

}  // namespace bcpar
