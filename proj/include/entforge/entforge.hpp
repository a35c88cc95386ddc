#pragma once

#include "entforge/types.hpp"
#include "entforge/linalg.hpp"
#include "entforge/qstate.hpp"
#include "entforge/noise.hpp"
#include "entforge/gates.hpp"
#include "entforge/activation.hpp"
#include "entforge/measures.hpp"
#include "entforge/random.hpp"
#include "entforge/topology.hpp"
#include "entforge/circuit.hpp"
#include "entforge/gradient.hpp"
#include "entforge/parallel.hpp"
#include "entforge/train.hpp"
#include "entforge/experiments.hpp"
