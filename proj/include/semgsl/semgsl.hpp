#pragma once

// Umbrella header: the whole library in one include.

#include <semgsl/belief.hpp>
#include <semgsl/categorical.hpp>
#include <semgsl/error.hpp>
#include <semgsl/estimation.hpp>
#include <semgsl/grid.hpp>
#include <semgsl/harness.hpp>
#include <semgsl/infogain.hpp>
#include <semgsl/io.hpp>
#include <semgsl/olfaction.hpp>
#include <semgsl/ontology.hpp>
#include <semgsl/oracle.hpp>
#include <semgsl/rng.hpp>
#include <semgsl/simulator.hpp>
