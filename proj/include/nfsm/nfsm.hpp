#pragma once

#include "automata.hpp"
#include "bands.hpp"
#include "compiler.hpp"
#include "encodings.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "network.hpp"
#include "nn.hpp"
#include "unrolled.hpp"
