#pragma once

#include <stdexcept>
#include <string>

namespace vflow {

/** Base of all library errors. `code` is a stable machine-readable tag that the
 *  CLI echoes into error JSON; `what()` carries the human-readable detail. */
struct Error : std::runtime_error {
    std::string code;
    Error(std::string code_, const std::string& msg)
        : std::runtime_error(msg), code(std::move(code_)) {}
};

#define VFLOW_DEFINE_ERROR(Name)                                            \
    struct Name : Error {                                                   \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}        \
    }

VFLOW_DEFINE_ERROR(DegenerateLattice);
VFLOW_DEFINE_ERROR(DetNotOne);
VFLOW_DEFINE_ERROR(NonPositiveDensity);
VFLOW_DEFINE_ERROR(CoincidentPoints);
VFLOW_DEFINE_ERROR(CollisionError);
VFLOW_DEFINE_ERROR(ToleranceNotReached);
VFLOW_DEFINE_ERROR(QuadratureFailure);
VFLOW_DEFINE_ERROR(StepUnderflow);
VFLOW_DEFINE_ERROR(SeriesNotConverged);
VFLOW_DEFINE_ERROR(OutsideDomain);
VFLOW_DEFINE_ERROR(NoCrossings);
VFLOW_DEFINE_ERROR(NoIsolatedEquilibria);
VFLOW_DEFINE_ERROR(PairDissociated);
VFLOW_DEFINE_ERROR(CurveTooCloseToVortex);
VFLOW_DEFINE_ERROR(ConfigError);
VFLOW_DEFINE_ERROR(NumericalError);

#undef VFLOW_DEFINE_ERROR

} // namespace vflow
