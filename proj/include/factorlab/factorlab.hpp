#pragma once

// Umbrella header for the whole library.

#include "factorlab/common.hpp"
#include "factorlab/dynamics.hpp"
#include "factorlab/ekstats.hpp"
#include "factorlab/friable.hpp"
#include "factorlab/harness.hpp"
#include "factorlab/primeset.hpp"
#include "factorlab/selfcheck.hpp"
#include "factorlab/sieve.hpp"
