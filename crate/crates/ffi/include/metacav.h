#ifndef METACAV_H
#define METACAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MetacavStatus {
  METACAV_STATUS_OK = 0,
  METACAV_STATUS_NULL_POINTER = 1,
  METACAV_STATUS_INVALID_ARGUMENT = 2,
  METACAV_STATUS_NUMERICAL = 3,
  METACAV_STATUS_BUFFER_TOO_SMALL = 4,
  METACAV_STATUS_PANIC = 5,
} MetacavStatus;

// Disk of radius R with constant permittivity, observation radius ρ and
// Fourier cutoff M.
typedef struct MetacavDisk MetacavDisk;

// WKB expansion on a curve described by a JSON model.
typedef struct MetacavExpansion MetacavExpansion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *metacav_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t metacav_last_error(char *buf, size_t len);

// J_m(z) and J_m′(z), each written as two doubles (re, im); `derivative`
// may be null.
//
// # Safety
// `value` must be valid for two doubles; `derivative` null or valid for two.
enum MetacavStatus metacav_bessel_j(int32_t order,
                                    double re,
                                    double im,
                                    double *value,
                                    double *derivative);

// I_m(z) and I_m′(z).
//
// # Safety
// As [`metacav_bessel_j`].
enum MetacavStatus metacav_bessel_i(int32_t order,
                                    double re,
                                    double im,
                                    double *value,
                                    double *derivative);

// H⁽¹⁾_m(z) and its derivative.
//
// # Safety
// As [`metacav_bessel_j`].
enum MetacavStatus metacav_hankel1(int32_t order,
                                   double re,
                                   double im,
                                   double *value,
                                   double *derivative);

// ε must be negative; ρ > R.
//
// # Safety
// `handle` must be valid for writes. The handle is owned by the caller.
enum MetacavStatus metacav_disk_new(double radius,
                                    double eps,
                                    double rho,
                                    size_t truncation,
                                    struct MetacavDisk **handle);

// # Safety
// `handle` must come from [`metacav_disk_new`] and not be used afterwards.
void metacav_disk_free(struct MetacavDisk *handle);

// N_{ε,ρ}(k) for a plane wave.
//
// # Safety
// `disk` must be a live handle and `ratio` valid for writes.
enum MetacavStatus metacav_disk_stability_ratio(const struct MetacavDisk *disk,
                                                double k,
                                                double *ratio);

// Roots ℓ of det M_m in the ℓ-rectangle, written to `roots` as
// interleaved (re, im). `count` receives the number found; if it exceeds `capacity`
// only the first `capacity` are written and the status is
// `METACAV_STATUS_BUFFER_TOO_SMALL`.
//
// # Safety
// `roots` must be valid for 2·`capacity` doubles (or null with capacity 0);
// `count` valid for writes.
enum MetacavStatus metacav_disk_resonances(const struct MetacavDisk *disk,
                                           int32_t m,
                                           double re_min,
                                           double re_max,
                                           double im_min,
                                           double im_max,
                                           double *roots,
                                           size_t capacity,
                                           size_t *count);

// Builds the expansion through `order` from a JSON model
// `{"geometry": {...}, "permittivity": {...}, "grid": n}`.
//
// # Safety
// `model_json` must be a NUL-terminated string; `handle` valid for writes.
enum MetacavStatus metacav_expansion_new(const char *model_json,
                                         size_t order,
                                         struct MetacavExpansion **handle);

// # Safety
// `handle` must come from [`metacav_expansion_new`] and not be used afterwards.
void metacav_expansion_free(struct MetacavExpansion *handle);

// Number of computed orders (N + 1).
//
// # Safety
// `exp` must be a live handle.
size_t metacav_expansion_orders(const struct MetacavExpansion *exp);

// λ_n.
//
// # Safety
// `exp` must be a live handle and `lambda` valid for writes.
enum MetacavStatus metacav_expansion_lambda(const struct MetacavExpansion *exp,
                                            size_t n,
                                            double *lambda);

// Coefficients ℓ̆₀, ℓ̆₁, ℓ̆₂ of the quasi-resonance; `imaginary` is set to 1
// when they describe |ℓ| on the positive imaginary axis.
//
// # Safety
// `exp` must be a live handle; `coeffs` valid for three doubles;
// `imaginary` null or valid for writes.
enum MetacavStatus metacav_expansion_sqrt_coeffs(const struct MetacavExpansion *exp,
                                                 double *coeffs,
                                                 int32_t *imaginary);

// Plasmonic interval I_m = [a, b] and its centre ℓ̆(m).
//
// # Safety
// `exp` must be a live handle; `interval` valid for three doubles
// (a, centre, b).
enum MetacavStatus metacav_expansion_interval(const struct MetacavExpansion *exp,
                                              int32_t m,
                                              double *interval);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* METACAV_H */
