# Given/When/Then steps shared by the certification and weighting features
