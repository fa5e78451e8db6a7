// errors.hpp: exception hierarchy shared by all multinoise modules

#pragma once

#include <stdexcept>
#include <string>

namespace multinoise {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MULTINOISE_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// schwartz-core / pseudo-fock
MULTINOISE_DEFINE_ERROR(ZeroGamma);
MULTINOISE_DEFINE_ERROR(IllConditionedBasis);
MULTINOISE_DEFINE_ERROR(CapacityExceeded);
MULTINOISE_DEFINE_ERROR(NotInSpan);
MULTINOISE_DEFINE_ERROR(SectorMismatch);

// quadrature and wcl-gamma
MULTINOISE_DEFINE_ERROR(QuadratureFailure);
MULTINOISE_DEFINE_ERROR(ImaginaryResidue);
MULTINOISE_DEFINE_ERROR(SlowDecay);
MULTINOISE_DEFINE_ERROR(DegenerateRoot);
MULTINOISE_DEFINE_ERROR(SupportConditionFailed);

// asymptotics
MULTINOISE_DEFINE_ERROR(BelowFloor);

// cli
MULTINOISE_DEFINE_ERROR(ConfigError);
MULTINOISE_DEFINE_ERROR(OracleMismatch);

#undef MULTINOISE_DEFINE_ERROR

} // namespace multinoise
