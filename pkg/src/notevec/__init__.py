"""Word-embedding features from free-text notes.

Pipeline stages live in their own modules: ``corpus`` (cleaning and
streaming), ``embedding`` (skip-gram training and word2vec text I/O),
``vecops`` (cosine search, seed bags, spherical k-means), ``features``
(bag and cluster scores per encounter), ``learn`` (labels, AdaBoost, AUC),
``synth`` (planted-signal data) and ``cli``.
"""

__version__ = "0.1.0"
