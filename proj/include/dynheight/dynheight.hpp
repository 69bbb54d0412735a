#pragma once

#include "dynheight/arithmetic.hpp"
#include "dynheight/bigfloat.hpp"
#include "dynheight/complexdyn.hpp"
#include "dynheight/errors.hpp"
#include "dynheight/heights.hpp"
#include "dynheight/padic.hpp"
#include "dynheight/pairing.hpp"
#include "dynheight/rootfind.hpp"
