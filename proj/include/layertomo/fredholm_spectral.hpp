#pragma once

#include "geometry.hpp"
#include "hankel.hpp"
#include "oracle.hpp"
#include "orthopoly.hpp"
#include "subinterval.hpp"
