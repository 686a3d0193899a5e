#include "sqcsef/error.hpp"

namespace sqcsef {

StageError::StageError(std::string stage, const Error& cause)
    : Error("stage '" + stage + "' failed: " + cause.what()),
      stage_(std::move(stage)),
      code_(cause.exit_code()) {}

}  // namespace sqcsef
