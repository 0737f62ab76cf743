#pragma once

#include "common.hpp"
#include "quadrature.hpp"
#include "scene.hpp"
#include "random_medium.hpp"
#include "synthesis.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "cint_core.hpp"
#include "kernel_model.hpp"
#include "spectral.hpp"
#include "lbfgs.hpp"
#include "fourier.hpp"
#include "phase_retrieval.hpp"
#include "io.hpp"
#include "scenario.hpp"
#include "validate.hpp"
#include "sweep.hpp"
