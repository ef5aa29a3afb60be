#pragma once

#include "abel_diving.hpp"
#include "cli_io.hpp"
#include "fredholm_spectral.hpp"
#include "io.hpp"
#include "moment_ambiguity.hpp"
#include "ray_kinematics.hpp"
#include "velocity_model.hpp"
