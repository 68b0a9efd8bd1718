#pragma once

namespace motionfit {

// Worker count handed to the OpenMP kernels. 0 selects the runtime default.
// Kernels partition work so that results do not depend on this value.
struct Workers {
    int count = 0;
};

int resolve_workers(Workers workers);

}  // namespace motionfit
