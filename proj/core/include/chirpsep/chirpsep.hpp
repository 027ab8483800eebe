#pragma once

#include "chirpsep/dbscan.hpp"
#include "chirpsep/errors.hpp"
#include "chirpsep/estimate.hpp"
#include "chirpsep/harness.hpp"
#include "chirpsep/io.hpp"
#include "chirpsep/kernel.hpp"
#include "chirpsep/signal.hpp"
#include "chirpsep/snippet.hpp"
