#pragma once

#include "nbwalk/census.hpp"
#include "nbwalk/cover.hpp"
#include "nbwalk/errors.hpp"
#include "nbwalk/intervals.hpp"
#include "nbwalk/montecarlo.hpp"
#include "nbwalk/multigraph.hpp"
#include "nbwalk/oracle.hpp"
#include "nbwalk/parallel.hpp"
#include "nbwalk/random.hpp"
#include "nbwalk/spectral.hpp"
#include "nbwalk/stats.hpp"
#include "nbwalk/surgery.hpp"
#include "nbwalk/word.hpp"
