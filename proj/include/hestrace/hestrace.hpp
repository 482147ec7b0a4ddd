#pragma once

#include "hestrace/automata.hpp"
#include "hestrace/automata_io.hpp"
#include "hestrace/bitset.hpp"
#include "hestrace/error.hpp"
#include "hestrace/harness.hpp"
#include "hestrace/hes.hpp"
#include "hestrace/hes_text.hpp"
#include "hestrace/lattice.hpp"
#include "hestrace/omega_input.hpp"
#include "hestrace/omega_io.hpp"
#include "hestrace/oracle.hpp"
#include "hestrace/phi.hpp"
#include "hestrace/trace.hpp"
