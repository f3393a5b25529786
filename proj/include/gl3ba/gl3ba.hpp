#pragma once

// Umbrella header.

#include "gl3ba/kernel.hpp"
#include "gl3ba/partitions.hpp"
#include "gl3ba/dwpf.hpp"
#include "gl3ba/hilbert.hpp"
#include "gl3ba/monodromy.hpp"
#include "gl3ba/sampling.hpp"
#include "gl3ba/bethe_vectors.hpp"
#include "gl3ba/identities.hpp"
#include "gl3ba/solver.hpp"
#include "gl3ba/report.hpp"
#include "gl3ba/suites.hpp"
