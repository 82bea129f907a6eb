#pragma once

#include "intricacy/coefficients.hpp"
#include "intricacy/engine.hpp"
#include "intricacy/generators.hpp"
#include "intricacy/info.hpp"
#include "intricacy/io.hpp"
#include "intricacy/optimizer.hpp"
#include "intricacy/rng.hpp"
#include "intricacy/system.hpp"
#include "intricacy/verify.hpp"
