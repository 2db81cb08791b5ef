#pragma once

#include <stdexcept>
#include <string>

namespace hexnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define HEXNET_DEFINE_ERROR(Name)                                 \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

HEXNET_DEFINE_ERROR(NotFullRank);
HEXNET_DEFINE_ERROR(NoDualExists);
HEXNET_DEFINE_ERROR(InvalidParams);
HEXNET_DEFINE_ERROR(RankError);
HEXNET_DEFINE_ERROR(LengthMismatch);
HEXNET_DEFINE_ERROR(NotInKernel);
HEXNET_DEFINE_ERROR(SyndromeMismatch);
HEXNET_DEFINE_ERROR(TooLarge);
HEXNET_DEFINE_ERROR(ShapeMismatch);
HEXNET_DEFINE_ERROR(DegenerateBatch);
HEXNET_DEFINE_ERROR(CorruptCheckpoint);
HEXNET_DEFINE_ERROR(NoCrossing);
HEXNET_DEFINE_ERROR(ConfigError);
HEXNET_DEFINE_ERROR(TrainingDiverged);

#undef HEXNET_DEFINE_ERROR

}  // namespace hexnet
