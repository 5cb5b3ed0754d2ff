#pragma once

// Umbrella header: the whole band engine except the command-line layer
// (include fluxband/cli.hpp separately when you want that).

#include "fluxband/analysis.hpp"
#include "fluxband/bands.hpp"
#include "fluxband/bloch.hpp"
#include "fluxband/cls.hpp"
#include "fluxband/cubic.hpp"
#include "fluxband/dynamics.hpp"
#include "fluxband/io.hpp"
#include "fluxband/params.hpp"
#include "fluxband/real_space.hpp"
#include "fluxband/spectral.hpp"
#include "fluxband/svg.hpp"
