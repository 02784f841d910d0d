#pragma once

namespace gspr {

// Every data-parallel kernel in the library accepts one of these. `Serial` is
// the reference path used by tests; both paths produce bit-identical results.
enum class Execution { Serial, Parallel };

}  // namespace gspr
