#pragma once

// Atomic units throughout (hbar = m_e = 1, lengths in bohr, energies in
// hartree). Times cross the public API in femtoseconds.

namespace bobs::units {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.0;
inline constexpr double kElectronMass = 1.0;

inline constexpr double kAtomicTimePerFs = 41.341374575751;
inline constexpr double kProtonMass = 1836.15267343;
inline constexpr double kH2PlusReducedMass = kProtonMass / 2.0;
inline constexpr double kHartreeToWavenumber = 219474.6313632;

constexpr double fs_to_au(double t_fs) { return t_fs * kAtomicTimePerFs; }
constexpr double au_to_fs(double t_au) { return t_au / kAtomicTimePerFs; }

}  // namespace bobs::units
