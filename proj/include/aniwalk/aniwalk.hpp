#pragma once

#include "aniwalk/analysis.hpp"
#include "aniwalk/exact.hpp"
#include "aniwalk/io.hpp"
#include "aniwalk/profile.hpp"
#include "aniwalk/rng.hpp"
#include "aniwalk/simulate.hpp"
#include "aniwalk/stats.hpp"
