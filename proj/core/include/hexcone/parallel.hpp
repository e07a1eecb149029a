#pragma once

#include <cstddef>
#include <functional>

namespace hexcone {

// Caps the worker count for every parallel loop in the library; 0 restores the default.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n) on the shared pool. Each index must write only its own output slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hexcone
