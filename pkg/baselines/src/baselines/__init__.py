"""GRU and Transformer seq2seq baselines trained on the generated splits."""
