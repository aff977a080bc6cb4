"""Room acoustics analysis: auralization, psychoacoustic feature extraction,
nonmetric MDS of dissimilarity ratings, and Kendall rank correlation."""

from ._roomac import (
    BarkBands,
    CorrelationCell,
    DecayCurve,
    Embedding,
    FeatureParams,
    FeatureVector,
    ImpulseResponse,
    RatingSet,
    Signal,
    Spectrogram,
    Spectrum,
    amplitude_for_db_spl,
    bark_band_levels,
    classify_stress,
    compute_feature_row,
    convolve,
    correlation_dimension,
    decay_time,
    dimension_sweep,
    echo_density,
    edt,
    extract_partials,
    fit_mds,
    fluctuation_strength,
    ir_decay_times,
    kendall_tau_b,
    load_ratings_csv,
    loudness,
    magnitude_spectrum,
    monotone_regression,
    read_wav,
    roughness_hb,
    roughness_sottek,
    rt20,
    rt30,
    run_pipeline,
    schroeder_decay,
    sharpness,
    spectral_centroid,
    stft,
    synth_am_tone,
    synth_corpus,
    synth_exponential_ir,
    synth_tone,
    synth_white_noise,
    tonality,
    write_wav,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
