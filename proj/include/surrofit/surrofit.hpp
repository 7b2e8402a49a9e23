#ifndef SURROFIT_SURROFIT_HPP
#define SURROFIT_SURROFIT_HPP

#include "surrofit/bench.hpp"
#include "surrofit/dataset.hpp"
#include "surrofit/numerics.hpp"
#include "surrofit/rng.hpp"
#include "surrofit/sampling.hpp"
#include "surrofit/serialize.hpp"
#include "surrofit/surrogate.hpp"
#include "surrofit/testbed.hpp"
#include "surrofit/transform.hpp"

#endif
