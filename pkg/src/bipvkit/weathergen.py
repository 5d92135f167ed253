"""Synthetic hourly weather for demos and tests.

Produces a deterministic, plausible one-year series for a site: clear-sky
direct beam from a simple airmass attenuation curve, a daily cloudiness
factor drawn from a seeded generator, and a seasonal + diurnal temperature
cycle.  GHI is closed exactly against DNI and DHI through this package's
own solar geometry, so horizontal-plane identities hold bit-exactly.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from .solar import WeatherRecord, WeatherSeries, _julian_day, _position_arrays

SOLAR_CONSTANT = 1361.0


def synthetic_year(
    year: int,
    latitude_deg: float,
    longitude_deg: float,
    utc_offset_hours: float = 8.0,
    seed: int | None = None,
) -> WeatherSeries:
    """One civil year of hourly records in the site's local fixed offset."""
    tz = timezone(timedelta(hours=utc_offset_hours))
    start = datetime(year, 1, 1, tzinfo=tz)
    end = datetime(year + 1, 1, 1, tzinfo=tz)
    n_hours = int((end - start).total_seconds() // 3600)
    timestamps = [start + timedelta(hours=h) for h in range(n_hours)]

    jd = np.array([_julian_day(ts) for ts in timestamps])
    zenith, _, _ = _position_arrays(jd, latitude_deg, longitude_deg)
    cos_zen = np.cos(np.radians(zenith))

    rng = np.random.default_rng(year if seed is None else seed)
    n_days = n_hours // 24 + 1
    # Daily beam clearness: a temperate-continental mix of clear and hazy days.
    beam_factor = np.clip(rng.beta(3.0, 2.0, size=n_days), 0.0, 1.0)
    day_index = np.array([(ts - start).days for ts in timestamps])
    kb = beam_factor[day_index]

    records = []
    for i, ts in enumerate(timestamps):
        cz = float(cos_zen[i])
        if cz > 0.0:
            airmass = 1.0 / (cz + 0.50572 * (96.07995 - float(zenith[i])) ** -1.6364)
            dni_clear = SOLAR_CONSTANT * 0.7 ** (airmass ** 0.678)
            dni = round(float(kb[i]) * dni_clear, 1)
            dhi = round((0.10 + 0.25 * (1.0 - float(kb[i]))) * SOLAR_CONSTANT * cz, 1)
            ghi = dni * cz + dhi  # exact closure against this package's geometry
        else:
            dni = dhi = ghi = 0.0
        day_of_year = (ts - start).days + 1
        hour = ts.hour + ts.minute / 60.0
        temp = (
            13.0
            + 14.0 * np.sin(2.0 * np.pi * (day_of_year - 105.0) / 365.0)
            + 5.0 * np.sin(2.0 * np.pi * (hour - 9.0) / 24.0)
        )
        wind = 2.5 + 1.5 * abs(np.sin(2.0 * np.pi * (hour - 3.0) / 24.0))
        records.append(
            WeatherRecord(
                timestamp=ts,
                ghi=float(ghi),
                dni=float(dni),
                dhi=float(dhi),
                temp_air=round(float(temp), 1),
                wind_speed=round(float(wind), 1),
            )
        )
    return WeatherSeries(records)
