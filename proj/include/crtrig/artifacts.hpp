// Text forms of the generated constants and table, and the routines that
// derive them from the arbitrary-precision oracle.
#pragma once

#include <string>

#include "crtrig/rangered.hpp"
#include "crtrig/tables.hpp"

namespace crtrig {

// One value per line: "<layout> <index> <hex value> [<last-bit exponent>]".
std::string format_pi_constants(const PiConstants& c);
PiConstants parse_pi_constants(const std::string& text);

// One entry per line: "<j> <hi> <lo>".
std::string format_sin_table(const SinTable& t);
SinTable parse_sin_table(const std::string& text);

// C++ initializer bodies for the compiled-in copies.
std::string pi_constants_inc(const PiConstants& c);
std::string sin_table_inc(const SinTable& t);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// 64-bit FNV-1a over the table's bit patterns.
std::uint64_t table_checksum(const SinTable& t);

// Derivations from the oracle.  gen_pi_constants throws
// std::invalid_argument when fewer than 256 bits are requested.
PiConstants gen_pi_constants(int oracle_bits);
SinTable build_sin_table();

}  // namespace crtrig
